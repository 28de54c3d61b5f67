#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qrng::extractor {

// Packed bit vector, LSB-first within each 64-bit word (bit i lives in word
// i/64 at position i%64). Trailing pad bits are kept zero.
class BitBlock {
public:
    BitBlock() = default;

    explicit BitBlock(std::size_t nbits)
        : words_((nbits + 63) / 64, 0), nbits_(nbits) {}

    static BitBlock from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
        if (bytes.size() * 8 < nbits)
            throw std::invalid_argument("BitBlock: byte buffer shorter than bit length");
        BitBlock b(nbits);
        for (std::size_t i = 0; i < nbits; ++i)
            if ((bytes[i / 8] >> (i % 8)) & 1) b.set(i, true);
        return b;
    }

    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> bytes((nbits_ + 7) / 8, 0);
        for (std::size_t i = 0; i < nbits_; ++i)
            if (get(i)) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
        return bytes;
    }

    std::size_t size() const { return nbits_; }
    std::size_t word_count() const { return words_.size(); }
    std::uint64_t word(std::size_t w) const { return words_[w]; }
    const std::uint64_t* data() const { return words_.data(); }

    bool get(std::size_t i) const {
        check_index(i);
        return (words_[i / 64] >> (i % 64)) & 1;
    }

    void set(std::size_t i, bool v) {
        check_index(i);
        std::uint64_t mask = std::uint64_t{1} << (i % 64);
        if (v)
            words_[i / 64] |= mask;
        else
            words_[i / 64] &= ~mask;
    }

    void set_word(std::size_t w, std::uint64_t value) {
        words_.at(w) = value;
        mask_tail();
    }

    BitBlock operator^(const BitBlock& o) const {
        if (o.nbits_ != nbits_)
            throw std::invalid_argument("BitBlock: length mismatch");
        BitBlock r(nbits_);
        for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] = words_[w] ^ o.words_[w];
        return r;
    }

    bool operator==(const BitBlock& o) const {
        return nbits_ == o.nbits_ && words_ == o.words_;
    }

private:
    void check_index(std::size_t i) const {
        if (i >= nbits_) throw std::out_of_range("BitBlock: bit index out of range");
    }

    void mask_tail() {
        std::size_t used = nbits_ % 64;
        if (used != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << used) - 1;
    }

    std::vector<std::uint64_t> words_;
    std::size_t nbits_ = 0;
};

// Append-only bit buffer used when concatenating variable-length outputs
// into an LSB-first byte stream.
class BitWriter {
public:
    void push(bool bit) {
        if (nbits_ % 8 == 0) bytes_.push_back(0);
        if (bit) bytes_.back() |= static_cast<std::uint8_t>(1u << (nbits_ % 8));
        ++nbits_;
    }

    void append(const BitBlock& block) {
        for (std::size_t i = 0; i < block.size(); ++i) push(block.get(i));
    }

    std::size_t bit_count() const { return nbits_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t nbits_ = 0;
};

}  // namespace qrng::extractor
