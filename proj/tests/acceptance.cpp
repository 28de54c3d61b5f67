// Acceptance harness: runs every release gate and prints one line per
// criterion. Exits nonzero if any gate fails or overruns its time budget.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrng/detailed_model.hpp"
#include "qrng/distribution.hpp"
#include "qrng/hashing.hpp"
#include "qrng/operators.hpp"
#include "qrng/planning.hpp"
#include "qrng/simple_model.hpp"
#include "qrng/simulator.hpp"

namespace {

using qrng::probcore::cond_min_entropy;
using qrng::probcore::JointDistribution;
using qrng::probcore::SmallOperator;
using qrng::probcore::born_joint;
using qrng::probcore::cdouble;

struct check_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& msg) {
    if (!ok) throw check_failure(msg);
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// Values pinned from a verified run of this build; they guard against silent
// numerical regressions, independent of any external reference.
constexpr double pinned_hmin_cond_alpha1 = 0.0917660736032;    // detailed, alpha2=1 fixture
constexpr double pinned_hmin_uncond_alpha20 = 1.32133197732;   // detailed, alpha2=20 fixture

qrng::models::DetailedModelParams mc_fixture_params(double alpha2) {
    qrng::models::DetailedModelParams params;
    params.alpha2 = alpha2;
    params.mu = 0.1;
    params.p_dark = 1e-6;
    params.gamma = 1e-3;
    params.delta = 1e-3;
    return params;
}

// 1. Two noise decompositions of the same measured state give guessing
//    probabilities 1/2 and 5/6 exactly.
std::string criterion_decompositions() {
    const double isq2 = 1.0 / std::sqrt(2.0);
    auto rho = SmallOperator::outer({isq2, isq2});
    std::vector<SmallOperator> projectors{SmallOperator::basis_projector(2, 0),
                                          SmallOperator::basis_projector(2, 1)};

    SmallOperator sigma_x(2, {0.0, 1.0, 1.0, 0.0});
    std::vector<SmallOperator> swap_noise{
        SmallOperator::identity(2).scaled(std::sqrt(2.0 / 3.0)),
        sigma_x.scaled(std::sqrt(1.0 / 3.0))};
    double g_swap = std::exp2(-cond_min_entropy(born_joint(rho, swap_noise, projectors)));

    std::vector<SmallOperator> reveal_noise{
        SmallOperator::identity(2).scaled(std::sqrt(1.0 / 3.0)),
        SmallOperator::basis_projector(2, 0).scaled(std::sqrt(2.0 / 3.0)),
        SmallOperator::basis_projector(2, 1).scaled(std::sqrt(2.0 / 3.0))};
    double g_reveal = std::exp2(-cond_min_entropy(born_joint(rho, reveal_noise, projectors)));

    check(std::abs(g_swap - 0.5) <= 1e-12, fmt("swap-noise guess %.17g != 1/2", g_swap));
    check(std::abs(g_reveal - 5.0 / 6.0) <= 1e-12,
          fmt("revealing-noise guess %.17g != 5/6", g_reveal));
    return fmt("guess %.12g vs %.12g for the same state", g_swap, g_reveal);
}

// 2. Sensitivity side information on a single-photon split: closed form
//    -log2(0.95) and agreement with a 1e7-sample Monte Carlo guesser.
std::string criterion_sensitivity_example() {
    const double mu = 0.1;
    JointDistribution joint({"0", "1"}, {"sensitive", "insensitive"},
                            {mu / 2.0, 1.0 - mu, mu / 2.0, 0.0});
    double hmin = cond_min_entropy(joint);
    double expect = -std::log2(1.0 - mu / 2.0);
    check(std::abs(hmin - expect) <= 1e-9, fmt("hmin %.12g != %.12g", hmin, expect));

    const std::uint64_t samples = 10000000;
    std::mt19937_64 rng(20260817);
    std::bernoulli_distribution sensitive(mu);
    std::bernoulli_distribution coin(0.5);
    std::uint64_t counts[2][2] = {{0, 0}, {0, 0}};
    for (std::uint64_t i = 0; i < samples; ++i) {
        bool s = sensitive(rng);
        bool x = s ? coin(rng) : false;
        counts[s ? 1 : 0][x ? 1 : 0] += 1;
    }
    double correct = static_cast<double>(std::max(counts[0][0], counts[0][1]) +
                                         std::max(counts[1][0], counts[1][1]));
    double p_hat = correct / static_cast<double>(samples);
    double sigma = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(samples));
    double p_theory = std::exp2(-hmin);
    check(std::abs(p_hat - p_theory) < 4.0 * sigma,
          fmt("MC guess %.6g vs theory %.6g exceeds 4 sigma = %.3g", p_hat, p_theory,
              4.0 * sigma));
    return fmt("hmin %.9g, MC guess within %.2f sigma", hmin,
               std::abs(p_hat - p_theory) / sigma);
}

// 3. Simplified model at high intensity: unconditional rate saturates at
//    -log2((1-mu)^2) while the conditional rate collapses.
std::string criterion_simple_saturation() {
    qrng::models::SimpleModelParams params;
    params.alpha2 = 20.0;
    params.mu = 0.1;
    auto report = qrng::models::entropy_report_simple(params);
    double target = -std::log2(0.81);
    check(std::abs(report.hmin_uncond - target) < 1e-3,
          fmt("hmin_uncond %.9g vs %.9g", report.hmin_uncond, target));
    check(report.hmin_cond < 1e-3, fmt("hmin_cond %.3g not collapsed", report.hmin_cond));
    return fmt("hmin_uncond %.9g (target %.9g), hmin_cond %.3g", report.hmin_uncond, target,
               report.hmin_cond);
}

// 4. The raw output distribution equals the sensitivity-weighted average of
//    the conditional rows across a parameter grid.
std::string criterion_row_average() {
    const double alphas[5] = {0.1, 0.5, 1.0, 2.5, 20.0};
    const double mus[4] = {0.0, 0.3, 0.7, 1.0};
    double worst = 0.0;
    for (double alpha2 : alphas) {
        for (double mu : mus) {
            qrng::models::SimpleModelParams params;
            params.alpha2 = alpha2;
            params.mu = mu;
            auto raw = qrng::models::raw_distribution_simple(params);

            qrng::models::SimpleConditionalTable table(params);
            auto w = qrng::models::poisson_weights(alpha2, params.resolved_n_max());
            double avg[4] = {0.0, 0.0, 0.0, 0.0};
            for (unsigned n = 0; n <= table.n_max(); ++n) {
                for (unsigned rv = 0; rv <= 1; ++rv) {
                    for (unsigned rh = 0; rh <= 1; ++rh) {
                        double weight = w.pmf[n] * (rv ? mu : 1.0 - mu) * (rh ? mu : 1.0 - mu);
                        if (weight == 0.0) continue;
                        auto row = table.row(n, rv, rh);
                        for (std::size_t k = 0; k < 4; ++k) avg[k] += weight * row.prob(k);
                    }
                }
            }
            for (std::size_t k = 0; k < 4; ++k)
                worst = std::max(worst, std::abs(avg[k] - raw.prob(k)));
        }
    }
    check(worst <= 1e-12, fmt("worst row-average deviation %.3g", worst));
    return fmt("20 parameter points, worst deviation %.3g", worst);
}

// 5. Exact leftover-hash distance by full enumeration of the matrix family
//    at n=4 with 3 bits of conditional min-entropy.
std::string criterion_exact_lhl() {
    std::string detail;
    for (std::uint32_t l = 1; l <= 2; ++l) {
        const std::uint32_t family = 1u << (4 * l);
        const double uniform = std::exp2(-static_cast<double>(l)) * 0.5;
        double dist = 0.0;
        for (std::uint32_t m = 0; m < family; ++m) {
            double q[4][2] = {};
            for (std::uint32_t x = 0; x < 16; ++x) {
                std::uint32_t y = 0;
                for (std::uint32_t r = 0; r < l; ++r) {
                    std::uint32_t row = (m >> (4 * r)) & 0xf;
                    y |= static_cast<std::uint32_t>(std::popcount(row & x) & 1) << r;
                }
                q[y][x < 8 ? 0 : 1] += 1.0 / 16.0;
            }
            double block = 0.0;
            for (std::uint32_t y = 0; y < (1u << l); ++y)
                for (int c = 0; c < 2; ++c) block += std::abs(q[y][c] - uniform);
            dist += 0.5 * block / static_cast<double>(family);
        }
        double eps = std::exp2(-(3.0 - static_cast<double>(l)) / 2.0);
        check(dist <= eps + 1e-15, fmt("l=%u distance %.12g exceeds bound %.12g", l, dist, eps));
        if (l == 1)
            check(std::abs(dist - 1.0 / 16.0) <= 1e-15,
                  fmt("l=1 distance %.17g != exact 1/16", dist));
        detail += fmt("l=%u: %.6g <= %.6g  ", l, dist, eps);
    }
    return detail;
}

// 6. Pairwise collision uniformity: exhaustive at n=4, l=2, then sampled at
//    n=l=64.
std::string criterion_collisions() {
    const std::uint32_t family = 1u << 8;
    for (std::uint32_t x = 0; x < 16; ++x) {
        for (std::uint32_t xp = x + 1; xp < 16; ++xp) {
            unsigned collisions = 0;
            for (std::uint32_t m = 0; m < family; ++m) {
                std::uint32_t d = x ^ xp;
                bool same0 = (std::popcount(m & 0xfu & d) & 1) == 0;
                bool same1 = (std::popcount((m >> 4) & 0xfu & d) & 1) == 0;
                if (same0 && same1) ++collisions;
            }
            check(collisions == family / 4,
                  fmt("pair (%u,%u): %u collisions out of %u", x, xp, collisions, family));
        }
    }

    std::mt19937_64 rng(64646464);
    std::vector<std::uint8_t> buf(512);
    qrng::extractor::BitBlock x(64), xp(64);
    x.set_word(0, 0x0123456789abcdefULL);
    xp.set_word(0, 0xfedcba9876543210ULL);
    const int trials = 100000;
    int full_collisions = 0, first_bit_equal = 0;
    for (int t = 0; t < trials; ++t) {
        for (std::size_t w = 0; w < 64; ++w) {
            std::uint64_t v = rng();
            for (std::size_t j = 0; j < 8; ++j)
                buf[8 * w + j] = static_cast<std::uint8_t>(v >> (8 * j));
        }
        auto seed = qrng::extractor::HashSeed::from_flat_bits(64, 64, buf);
        auto ya = qrng::extractor::hash_block(seed, x);
        auto yb = qrng::extractor::hash_block(seed, xp);
        if (ya == yb) ++full_collisions;
        if (ya.get(0) == yb.get(0)) ++first_bit_equal;
    }
    check(full_collisions == 0,
          fmt("%d full 64-bit collisions in %d trials (expect ~%.1g)", full_collisions, trials,
              trials * std::exp2(-64.0)));
    double freq = static_cast<double>(first_bit_equal) / trials;
    double sigma = std::sqrt(0.25 / trials);
    check(std::abs(freq - 0.5) < 4.0 * sigma,
          fmt("per-row collision rate %.4f off 1/2 by more than 4 sigma", freq));
    return fmt("120 exhaustive pairs at 1/4; 64-bit: 0 full collisions, row rate %.4f", freq);
}

// 7. The packed hashing kernel agrees with the bitwise reference everywhere
//    it is exercised.
std::string criterion_kernel_equivalence() {
    std::mt19937_64 rng(777);
    std::bernoulli_distribution coin(0.5);
    std::vector<std::uint8_t> buf(512);

    for (int t = 0; t < 10000; ++t) {
        for (std::size_t w = 0; w < 64; ++w) {
            std::uint64_t v = rng();
            for (std::size_t j = 0; j < 8; ++j)
                buf[8 * w + j] = static_cast<std::uint8_t>(v >> (8 * j));
        }
        auto seed = qrng::extractor::HashSeed::from_flat_bits(64, 64, buf);
        qrng::extractor::BitBlock x(64);
        x.set_word(0, rng());
        check(qrng::extractor::hash_block(seed, x) == qrng::extractor::hash_block_naive(seed, x),
              fmt("packed/naive mismatch at n=l=64, trial %d", t));
    }

    for (int s = 0; s < 10; ++s) {
        qrng::extractor::HashSeed seed(8, 4);
        for (std::uint32_t r = 0; r < 4; ++r)
            for (std::uint32_t c = 0; c < 8; ++c) seed.set_bit(r, c, coin(rng));
        for (std::uint32_t v = 0; v < 256; ++v) {
            qrng::extractor::BitBlock x(8);
            x.set_word(0, v);
            check(qrng::extractor::hash_block(seed, x) ==
                      qrng::extractor::hash_block_naive(seed, x),
                  fmt("packed/naive mismatch at n=8 input %u", v));
        }
    }
    return "10000 random 64x64 cases and 2560 exhaustive 4x8 cases agree";
}

// 8. End-to-end consistency of the detailed model: the analytic conditional
//    rate matches an independent 1e7-pulse simulation, the rate curves have
//    the expected shape over an intensity sweep, and two representative
//    values are pinned against drift.
std::string criterion_model_simulator_agreement() {
    auto params = mc_fixture_params(1.0);
    auto report = qrng::models::entropy_report_detailed(params);
    double g_theory = std::exp2(-report.hmin_cond);

    qrng::simulator::SimulationConfig config;
    config.params = params;
    config.pulse_count = 10000000;
    config.rng_seed = 424242;
    config.noise_mode = qrng::simulator::NoiseMode::stationary;
    qrng::simulator::GuessingCounter counter({true, true, true});
    qrng::simulator::simulate(config,
                              [&](const qrng::simulator::PulseRecord& rec) { counter.add(rec); });
    auto est = counter.estimate();
    check(std::abs(est.p_guess - g_theory) < 4.0 * est.std_error,
          fmt("MC guess %.6f vs theory %.6f exceeds 4 sigma = %.2g", est.p_guess, g_theory,
              4.0 * est.std_error));

    const int points = 25;
    std::vector<double> h_cond(points), h_uncond_simple(points), grid(points);
    for (int i = 0; i < points; ++i) {
        double t = static_cast<double>(i) / (points - 1);
        grid[i] = std::exp(std::log(1e-3) + t * (std::log(20.0) - std::log(1e-3)));
        h_cond[i] = qrng::models::entropy_report_detailed(mc_fixture_params(grid[i])).hmin_cond;

        qrng::models::SimpleModelParams sp;
        sp.alpha2 = grid[i];
        sp.mu = 0.1;
        h_uncond_simple[i] = qrng::models::entropy_report_simple(sp).hmin_uncond;
    }
    int peak = 0;
    for (int i = 1; i < points; ++i)
        if (h_cond[i] > h_cond[peak]) peak = i;
    // The geometric threshold mean 1/mu sits near n/2 at the top of the sweep,
    // so the decay past the peak is gradual; a strict drop is still required.
    check(peak > 0 && peak < points - 1, fmt("conditional-rate peak at the sweep edge (%d)", peak));
    check(h_cond[0] < 0.1 * h_cond[peak],
          fmt("no rise: h(%.3g)=%.3g vs peak %.3g", grid[0], h_cond[0], h_cond[peak]));
    check(h_cond[points - 1] < 0.92 * h_cond[peak],
          fmt("no decay: h(%.3g)=%.3g vs peak %.3g", grid[points - 1], h_cond[points - 1],
              h_cond[peak]));

    double sat_target = -std::log2(0.81);
    check(std::abs(h_uncond_simple[points - 1] - sat_target) < 1e-3,
          fmt("simplified unconditional rate %.9g not saturated at %.9g",
              h_uncond_simple[points - 1], sat_target));
    for (int i = points / 2; i + 1 < points; ++i)
        check(h_uncond_simple[i + 1] >= h_uncond_simple[i] - 1e-12,
              fmt("simplified unconditional rate not monotone near saturation (i=%d)", i));
    check(h_uncond_simple[points - 1] - h_uncond_simple[points - 3] < 1e-2,
          "simplified unconditional rate still moving at the top of the sweep");

    double pin1 = report.hmin_cond;
    double pin2 = qrng::models::entropy_report_detailed(mc_fixture_params(20.0)).hmin_uncond;
    check(std::abs(pin1 - pinned_hmin_cond_alpha1) <= 1e-9,
          fmt("hmin_cond(alpha2=1) drifted: %.17g vs pinned %.17g", pin1,
              pinned_hmin_cond_alpha1));
    check(std::abs(pin2 - pinned_hmin_uncond_alpha20) <= 1e-9,
          fmt("hmin_uncond(alpha2=20) drifted: %.17g vs pinned %.17g", pin2,
              pinned_hmin_uncond_alpha20));

    return fmt("MC within %.2f sigma; peak %.4g at alpha2=%.3g; saturation %.6g",
               std::abs(est.p_guess - g_theory) / est.std_error, h_cond[peak], grid[peak],
               h_uncond_simple[points - 1]);
}

// 9. The click-probability solver reproduces the closed form at unit
//    efficiency with no noise.
std::string criterion_solver_closed_form() {
    std::string detail;
    for (double alpha2 : {0.1, 1.0, 5.0}) {
        qrng::models::DetailedModelParams params;
        params.alpha2 = alpha2;
        params.mu = 1.0;
        auto sol = qrng::models::solve_px(params);
        double expect = 1.0 - std::exp(-alpha2 / 2.0);
        check(std::abs(sol.p_det - expect) < 1e-10,
              fmt("alpha2=%.3g: p_det %.12g vs %.12g", alpha2, sol.p_det, expect));
        detail += fmt("%.3g ", sol.p_det);
    }
    return "p_det " + detail + "match 1 - exp(-alpha2/2)";
}

// 10. Extraction planning: exact error accounting, refusal on insufficient
//     entropy, and the Shannon sanity flag on inflated claims.
std::string criterion_planning() {
    auto plan = qrng::extractor::plan_extraction(100.0, std::nullopt, 128, 1e-6, 1000, 2e-7);
    check(plan.eps_total == 1000.0 * plan.eps_hash + 2e-7, "error accounting is not exact");

    bool refused = false;
    try {
        qrng::extractor::plan_extraction(10.0, std::nullopt, 64, std::exp2(-10.0), 1);
    } catch (const qrng::extractor::insufficient_entropy_error& e) {
        refused = true;
        check(std::abs(e.deficit_bits - 11.0) < 1e-9,
              fmt("deficit %.6g != 11 bits", e.deficit_bits));
    }
    check(refused, "negative output length was not refused");

    auto inflated =
        qrng::extractor::plan_extraction(100.0, 10.0, 128, std::exp2(-20.0), 1);
    check(inflated.l == 60, fmt("plan length %u != 60", inflated.l));
    check(inflated.shannon_length_bound.has_value(), "missing Shannon bound");
    check(*inflated.shannon_length_bound > 10.0 && *inflated.shannon_length_bound < 10.001,
          fmt("Shannon cap %.9g outside (10, 10.001)", *inflated.shannon_length_bound));
    check(!inflated.consistent, "inflated min-entropy claim not flagged");
    return fmt("cap %.9g flags l=60 as inconsistent", *inflated.shannon_length_bound);
}

struct Criterion {
    const char* label;
    double budget_seconds;
    std::function<std::string()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"decomposition-dependent guessing power", 1.0, criterion_decompositions},
        {"sensitivity side information example", 30.0, criterion_sensitivity_example},
        {"high-intensity saturation, simplified model", 1.0, criterion_simple_saturation},
        {"raw distribution is the weighted row average", 1.0, criterion_row_average},
        {"exact leftover-hash distance on a small family", 10.0, criterion_exact_lhl},
        {"pairwise collision uniformity", 60.0, criterion_collisions},
        {"hashing kernel equivalence", 30.0, criterion_kernel_equivalence},
        {"detailed model vs simulator, curve shapes, pins", 300.0,
         criterion_model_simulator_agreement},
        {"click-probability closed form", 1.0, criterion_solver_closed_form},
        {"extraction planning accounting and refusal", 1.0, criterion_planning},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = true;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            pass = false;
            detail = e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (pass && elapsed > c.budget_seconds) {
            pass = false;
            detail = fmt("overran the %.0f s budget", c.budget_seconds);
        }
        std::printf("[%s] %2zu. %s (%.2f s) %s\n", pass ? "PASS" : "FAIL", i + 1, c.label,
                    elapsed, detail.c_str());
        if (!pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
