#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "qrng/bitblock.hpp"
#include "qrng/byteio.hpp"
#include "qrng/hashing.hpp"

namespace qrng::extractor {

struct StreamStats {
    std::uint64_t blocks_processed = 0;
    std::uint64_t discarded_bits = 0;  // input bits not covered by a processed block
};

// Extracts consecutive n-bit blocks from an LSB-first bit stream with the
// same seed, concatenating the l-bit outputs. Trailing bits that do not fill
// a block are discarded, never padded.
inline StreamStats extract_stream(const HashSeed& seed,
                                  const std::vector<std::uint8_t>& input,
                                  std::vector<std::uint8_t>& output,
                                  std::optional<std::uint64_t> max_blocks = std::nullopt) {
    const std::uint64_t total_bits = static_cast<std::uint64_t>(input.size()) * 8;
    std::uint64_t blocks = total_bits / seed.n();
    if (max_blocks && *max_blocks < blocks) blocks = *max_blocks;

    BitWriter writer;
    BitBlock x(seed.n());
    for (std::uint64_t b = 0; b < blocks; ++b) {
        std::uint64_t base = b * seed.n();
        for (std::uint32_t j = 0; j < seed.n(); ++j) {
            std::uint64_t k = base + j;
            x.set(j, (input[k / 8] >> (k % 8)) & 1);
        }
        writer.append(hash_block(seed, x));
    }
    output = writer.bytes();

    StreamStats stats;
    stats.blocks_processed = blocks;
    stats.discarded_bits = total_bits - blocks * seed.n();
    return stats;
}

inline StreamStats extract_stream(const HashSeed& seed, std::istream& in, std::ostream& out,
                                  std::optional<std::uint64_t> max_blocks = std::nullopt) {
    std::vector<std::uint8_t> input((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw io_error("extract_stream: read failure");
    std::vector<std::uint8_t> output;
    StreamStats stats = extract_stream(seed, input, output, max_blocks);
    out.write(reinterpret_cast<const char*>(output.data()),
              static_cast<std::streamsize>(output.size()));
    if (!out) throw io_error("extract_stream: write failure");
    return stats;
}

}  // namespace qrng::extractor
