#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "qrng/distribution.hpp"

namespace qrng::extractor {

struct insufficient_entropy_error : std::runtime_error {
    insufficient_entropy_error(const std::string& msg, double deficit)
        : std::runtime_error(msg), deficit_bits(deficit) {}
    // additional bits of per-block min-entropy needed to emit one output bit
    double deficit_bits;
};

struct ExtractionPlan {
    std::uint32_t n = 0;
    std::uint32_t l = 0;
    double hmin_per_block = 0.0;
    std::optional<double> shannon_per_block;
    double eps_target = 0.0;
    double eps_hash = 0.0;
    double eps_seed = 0.0;
    double eps_total = 0.0;
    std::uint64_t k_blocks = 1;
    // Shannon upper bound on l (when shannon_per_block was supplied); a plan
    // whose l exceeds it signals an inflated hmin input.
    std::optional<double> shannon_length_bound;
    bool consistent = true;
};

// Upper bound on the output length from the Shannon entropy:
//   l <= H + 4 eps log2(l) + 2 h(eps)
// solved for l by fixed-point iteration.
inline double shannon_length_cap(double shannon, double eps) {
    if (!(shannon >= 0.0))
        throw std::invalid_argument("shannon_length_cap: negative entropy");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("shannon_length_cap: eps must be in (0,1)");
    double extra = 2.0 * probcore::binary_entropy(eps);
    double cap = shannon + extra;
    for (int i = 0; i < 200; ++i) {
        double next = shannon + 4.0 * eps * std::log2(std::max(cap, 2.0)) + extra;
        if (std::abs(next - cap) < 1e-12) return next;
        cap = next;
    }
    return cap;
}

// Proposition-1 planning with the block accounting eps_total = k eps_hash +
// eps_seed: the per-block hashing error is the remaining budget split evenly
// across blocks, and l = floor(hmin - 2 log2(1/eps_hash)).
inline ExtractionPlan plan_extraction(double hmin_per_block,
                                      std::optional<double> shannon_per_block,
                                      std::uint32_t n, double eps_target,
                                      std::uint64_t k_blocks, double eps_seed = 0.0) {
    if (!(eps_target > 0.0 && eps_target < 1.0))
        throw std::invalid_argument("plan_extraction: eps_target must be in (0,1)");
    if (!(eps_seed >= 0.0 && eps_seed < eps_target))
        throw std::invalid_argument("plan_extraction: eps_seed must be in [0, eps_target)");
    if (k_blocks < 1)
        throw std::invalid_argument("plan_extraction: k_blocks must be >= 1");
    if (!(hmin_per_block >= 0.0 && hmin_per_block <= static_cast<double>(n)))
        throw std::invalid_argument("plan_extraction: hmin_per_block must be in [0, n]");
    if (shannon_per_block && !(*shannon_per_block >= 0.0))
        throw std::invalid_argument("plan_extraction: shannon_per_block must be >= 0");

    ExtractionPlan plan;
    plan.n = n;
    plan.hmin_per_block = hmin_per_block;
    plan.shannon_per_block = shannon_per_block;
    plan.eps_target = eps_target;
    plan.eps_seed = eps_seed;
    plan.k_blocks = k_blocks;
    plan.eps_hash = (eps_target - eps_seed) / static_cast<double>(k_blocks);

    double l_real = hmin_per_block + 2.0 * std::log2(plan.eps_hash);
    double l_floor = std::floor(l_real);
    if (l_floor < 1.0)
        throw insufficient_entropy_error(
            "plan_extraction: insufficient entropy (l = " + std::to_string(l_floor) +
                "); need " + std::to_string(1.0 - l_real) + " more bits per block",
            1.0 - l_real);
    plan.l = static_cast<std::uint32_t>(l_floor);
    plan.eps_total = static_cast<double>(k_blocks) * plan.eps_hash + eps_seed;

    if (shannon_per_block) {
        plan.shannon_length_bound = shannon_length_cap(*shannon_per_block, plan.eps_hash);
        plan.consistent = static_cast<double>(plan.l) <= *plan.shannon_length_bound;
    }
    return plan;
}

}  // namespace qrng::extractor
