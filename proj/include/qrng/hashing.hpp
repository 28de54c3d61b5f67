#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrng/bitblock.hpp"
#include "qrng/byteio.hpp"

namespace qrng::extractor {

struct entropy_source_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct seed_format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Supplier of uniform seed bits. Implementations must be independent of the
// device whose output is being extracted.
class EntropySource {
public:
    virtual ~EntropySource() = default;
    // Fills the buffer completely or returns false (source exhausted).
    virtual bool fill(std::uint8_t* out, std::size_t nbytes) = 0;
};

class BufferEntropySource : public EntropySource {
public:
    explicit BufferEntropySource(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

    bool fill(std::uint8_t* out, std::size_t nbytes) override {
        if (bytes_.size() - pos_ < nbytes) return false;
        for (std::size_t i = 0; i < nbytes; ++i) out[i] = bytes_[pos_ + i];
        pos_ += nbytes;
        return true;
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

class SystemEntropySource : public EntropySource {
public:
    bool fill(std::uint8_t* out, std::size_t nbytes) override {
        for (std::size_t i = 0; i < nbytes; ++i)
            out[i] = static_cast<std::uint8_t>(rd_() & 0xff);
        return true;
    }

private:
    std::random_device rd_;
};

// An l x n binary matrix over GF(2), rows packed LSB-first into 64-bit words.
// Drawing the matrix uniformly at random realizes a two-universal hash family
// with collision probability exactly 2^-l.
class HashSeed {
public:
    HashSeed(std::uint32_t n, std::uint32_t l)
        : n_(n), l_(l), words_per_row_((n + 63) / 64),
          rows_(static_cast<std::size_t>(l) * words_per_row_, 0) {
        if (l_ < 1 || l_ > n_)
            throw std::invalid_argument("HashSeed: need 1 <= l <= n");
    }

    std::uint32_t n() const { return n_; }
    std::uint32_t l() const { return l_; }
    std::size_t words_per_row() const { return words_per_row_; }

    std::uint64_t row_word(std::size_t row, std::size_t w) const {
        return rows_[row * words_per_row_ + w];
    }

    bool bit(std::size_t row, std::size_t col) const {
        return (row_word(row, col / 64) >> (col % 64)) & 1;
    }

    void set_bit(std::size_t row, std::size_t col, bool v) {
        if (row >= l_ || col >= n_)
            throw std::out_of_range("HashSeed: index out of range");
        std::uint64_t mask = std::uint64_t{1} << (col % 64);
        auto& word = rows_[row * words_per_row_ + col / 64];
        if (v)
            word |= mask;
        else
            word &= ~mask;
    }

    // Matrix bits as one contiguous row-major bit string, LSB-first bytes.
    std::vector<std::uint8_t> flat_bits() const {
        std::size_t total = static_cast<std::size_t>(n_) * l_;
        std::vector<std::uint8_t> bytes((total + 7) / 8, 0);
        std::size_t k = 0;
        for (std::uint32_t r = 0; r < l_; ++r)
            for (std::uint32_t c = 0; c < n_; ++c, ++k)
                if (bit(r, c)) bytes[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
        return bytes;
    }

    static HashSeed from_flat_bits(std::uint32_t n, std::uint32_t l,
                                   const std::vector<std::uint8_t>& bytes) {
        std::size_t total = static_cast<std::size_t>(n) * l;
        if (bytes.size() < (total + 7) / 8)
            throw std::invalid_argument("HashSeed: bit buffer too short");
        HashSeed seed(n, l);
        std::size_t k = 0;
        for (std::uint32_t r = 0; r < l; ++r)
            for (std::uint32_t c = 0; c < n; ++c, ++k)
                if ((bytes[k / 8] >> (k % 8)) & 1) seed.set_bit(r, c, true);
        return seed;
    }

private:
    std::uint32_t n_, l_;
    std::size_t words_per_row_;
    std::vector<std::uint64_t> rows_;
};

// Draws every matrix bit from the source, row-major. Deterministic given the
// source stream: matrix bit k is bit k of the stream, LSB-first.
inline HashSeed sample_seed(std::uint32_t n, std::uint32_t l, EntropySource& source) {
    if (l < 1 || l > n)
        throw std::invalid_argument("sample_seed: need 1 <= l <= n");
    std::size_t total = static_cast<std::size_t>(n) * l;
    std::vector<std::uint8_t> bytes((total + 7) / 8);
    if (!source.fill(bytes.data(), bytes.size()))
        throw entropy_source_error("sample_seed: entropy source exhausted");
    return HashSeed::from_flat_bits(n, l, bytes);
}

// y_i = parity(row_i AND x): word-wise AND, XOR fold, popcount parity.
// Handles any n because pad bits are zero; for n, l multiples of 64 every
// operation is a full-word step.
inline BitBlock hash_block(const HashSeed& seed, const BitBlock& x) {
    if (x.size() != seed.n())
        throw std::invalid_argument("hash_block: input length does not match seed.n");
    BitBlock y(seed.l());
    const std::size_t wpr = seed.words_per_row();
    for (std::uint32_t i = 0; i < seed.l(); ++i) {
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < wpr; ++w) acc ^= seed.row_word(i, w) & x.word(w);
        if (std::popcount(acc) & 1) y.set(i, true);
    }
    return y;
}

// Bit-by-bit reference implementation, used as the oracle for the packed
// kernel.
inline BitBlock hash_block_naive(const HashSeed& seed, const BitBlock& x) {
    if (x.size() != seed.n())
        throw std::invalid_argument("hash_block_naive: input length does not match seed.n");
    BitBlock y(seed.l());
    for (std::uint32_t i = 0; i < seed.l(); ++i) {
        unsigned parity = 0;
        for (std::uint32_t j = 0; j < seed.n(); ++j)
            parity ^= (seed.bit(i, j) && x.get(j)) ? 1u : 0u;
        if (parity) y.set(i, true);
    }
    return y;
}

inline constexpr char seed_file_magic[4] = {'T', 'U', 'H', '1'};

inline void save_seed(std::ostream& out, const HashSeed& seed) {
    out.write(seed_file_magic, 4);
    write_u32le(out, seed.n());
    write_u32le(out, seed.l());
    auto bytes = seed.flat_bits();
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("save_seed: write failure");
}

inline HashSeed load_seed(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != std::string(seed_file_magic, 4))
        throw seed_format_error("load_seed: bad magic");
    std::uint32_t n, l;
    try {
        n = read_u32le(in);
        l = read_u32le(in);
    } catch (const io_error&) {
        throw seed_format_error("load_seed: truncated header");
    }
    if (l < 1 || l > n)
        throw seed_format_error("load_seed: invalid block lengths");
    std::size_t total = static_cast<std::size_t>(n) * l;
    std::vector<std::uint8_t> bytes((total + 7) / 8);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size())
        throw seed_format_error("load_seed: truncated matrix");
    return HashSeed::from_flat_bits(n, l, bytes);
}

}  // namespace qrng::extractor
