#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qrng/distribution.hpp"
#include "qrng/model_types.hpp"
#include "qrng/poisson.hpp"

namespace qrng::models {

inline const std::vector<std::string>& outcome_labels() {
    static const std::vector<std::string> labels{"00", "01", "10", "11"};
    return labels;
}

// P(x_v x_h | n, r_v, r_h) for the simplified model; r in {0,1} encodes an
// insensitive (never clicks) or sensitive (clicks on >= 1 photon) detector.
// Entries are dyadic, so rows sum to 1 exactly.
class SimpleConditionalTable {
public:
    explicit SimpleConditionalTable(const SimpleModelParams& params)
        : params_(params), n_max_(params.resolved_n_max()) {}

    probcore::FiniteDistribution row(unsigned n, unsigned r_v, unsigned r_h) const {
        if (r_v > 1 || r_h > 1)
            throw std::invalid_argument("SimpleConditionalTable: r_v, r_h must be 0 or 1");
        if (n > n_max_)
            throw std::invalid_argument("SimpleConditionalTable: n exceeds n_max");
        double t = std::ldexp(1.0, -static_cast<int>(n));
        double p00 = 0.0, p01 = 0.0, p10 = 0.0, p11 = 0.0;
        if (n == 0 || (r_v == 0 && r_h == 0)) {
            p00 = 1.0;
        } else if (r_v == 1 && r_h == 0) {
            p00 = t;
            p10 = 1.0 - t;
        } else if (r_v == 0 && r_h == 1) {
            p00 = t;
            p01 = 1.0 - t;
        } else {
            p01 = t;
            p10 = t;
            p11 = 1.0 - 2.0 * t;
        }
        return probcore::FiniteDistribution(outcome_labels(), {p00, p01, p10, p11});
    }

    unsigned n_max() const { return n_max_; }
    const SimpleModelParams& params() const { return params_; }

private:
    SimpleModelParams params_;
    unsigned n_max_;
};

inline SimpleConditionalTable conditional_table_simple(const SimpleModelParams& params) {
    return SimpleConditionalTable(params);
}

// Raw output distribution over {00,01,10,11}: the sensitivity-averaged
// conditional rows weighted by the truncated Poisson distribution. The sum
// falls short of 1 by the truncation error, which widens the accepted
// normalization tolerance accordingly.
inline probcore::FiniteDistribution raw_distribution_simple(const SimpleModelParams& params) {
    params.validate();
    const unsigned n_max = params.resolved_n_max();
    const auto w = poisson_weights(params.alpha2, n_max);
    const double mu = params.mu;
    double p00 = w.pmf[0], p01 = 0.0, p10 = 0.0, p11 = 0.0;
    for (unsigned n = 1; n <= n_max; ++n) {
        double t = std::ldexp(1.0, -static_cast<int>(n));
        double pn = w.pmf[n];
        p00 += pn * ((1.0 - mu) * (1.0 - mu) + 2.0 * mu * (1.0 - mu) * t);
        double side = mu * mu * t + mu * (1.0 - mu) * (1.0 - t);
        p01 += pn * side;
        p10 += pn * side;
        p11 += pn * mu * mu * (1.0 - 2.0 * t);
    }
    return probcore::FiniteDistribution(outcome_labels(), {p00, p01, p10, p11},
                                        w.tail + probcore::normalization_tolerance);
}

// Closed-form entropy report for the simplified model.
inline EntropyReport entropy_report_simple(const SimpleModelParams& params) {
    params.validate();
    const unsigned n_max = params.resolved_n_max();
    const auto w = poisson_weights(params.alpha2, n_max);
    const double mu = params.mu;

    double guess = w.pmf[0];
    double shannon = 0.0;
    for (unsigned n = 1; n <= n_max; ++n) {
        double t = std::ldexp(1.0, -static_cast<int>(n));
        double pn = w.pmf[n];
        guess += pn * ((1.0 - mu) * (1.0 - mu) +
                       2.0 * mu * (1.0 - mu) * (1.0 - t) +
                       mu * mu * std::max(t, 1.0 - 2.0 * t));
        double h_mixed = probcore::binary_entropy(t);
        double h_both = 0.0;
        if (t > 0.0) h_both -= 2.0 * t * std::log2(t);
        if (1.0 - 2.0 * t > 0.0) h_both -= (1.0 - 2.0 * t) * std::log2(1.0 - 2.0 * t);
        shannon += pn * (2.0 * mu * (1.0 - mu) * h_mixed + mu * mu * h_both);
    }

    EntropyReport report;
    report.hmin_cond = std::max(0.0, -std::log2(guess));
    report.shannon_cond = shannon;
    report.hmin_uncond = probcore::min_entropy(raw_distribution_simple(params));
    report.truncation_error = w.tail;
    return report;
}

}  // namespace qrng::models
