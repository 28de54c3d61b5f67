#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qrng/distribution.hpp"
#include "qrng/model_types.hpp"
#include "qrng/poisson.hpp"
#include "qrng/simple_model.hpp"

namespace qrng::models {

// Cumulative distribution of Bin(n, 1/2), built center-out and normalized so
// the masses form an exact partition of unity even for large n.
class BinomialHalfCdf {
public:
    explicit BinomialHalfCdf(unsigned n) : n_(n), cdf_(n + 1) {
        std::vector<double> raw(n + 1);
        unsigned j0 = n / 2;
        raw[j0] = std::exp(std::lgamma(n + 1.0) - std::lgamma(j0 + 1.0) -
                           std::lgamma(n - j0 + 1.0) - n * std::log(2.0));
        for (unsigned j = j0; j < n; ++j)
            raw[j + 1] = raw[j] * static_cast<double>(n - j) / static_cast<double>(j + 1);
        for (unsigned j = j0; j > 0; --j)
            raw[j - 1] = raw[j] * static_cast<double>(j) / static_cast<double>(n - j + 1);
        double total = 0.0;
        for (double t : raw) total += t;
        double cum = 0.0;
        for (unsigned k = 0; k <= n; ++k) {
            cum += raw[k];
            cdf_[k] = cum / total;
        }
        cdf_[n] = 1.0;
    }

    unsigned n() const { return n_; }

    // P(m <= k) for m ~ Bin(n, 1/2)
    double le(long k) const {
        if (k < 0) return 0.0;
        if (k >= static_cast<long>(n_)) return 1.0;
        return cdf_[static_cast<std::size_t>(k)];
    }

    // P(m >= k)
    double ge(long k) const { return le(static_cast<long>(n_) - k); }

private:
    unsigned n_;
    std::vector<double> cdf_;
};

// Row P(x_v x_h | n, r_v, r_h, s_v, s_h) of the detailed model. Thresholds
// above n mean the detector cannot be triggered by photons. m counts photons
// on the v path; x_v = 1 iff s_v or m >= r_v, x_h = 1 iff s_h or n-m >= r_h.
inline probcore::FiniteDistribution detailed_conditional_row(const BinomialHalfCdf& cdf,
                                                             unsigned r_v, unsigned r_h,
                                                             bool s_v, bool s_h) {
    if (r_v < 1 || r_h < 1)
        throw std::invalid_argument("detailed_conditional_row: thresholds must be >= 1");
    const long n = cdf.n();
    const long kv = static_cast<long>(r_v) - 1;  // x_v = 0 iff m <= kv (photons only)
    const long kh = n - static_cast<long>(r_h);  // x_h = 1 iff m <= kh (photons only)
    double p00 = 0.0, p01 = 0.0, p10 = 0.0, p11 = 0.0;
    if (s_v && s_h) {
        p11 = 1.0;
    } else if (!s_v && s_h) {
        p01 = cdf.le(kv);
        p11 = 1.0 - p01;
    } else if (s_v && !s_h) {
        p11 = cdf.le(kh);
        p10 = 1.0 - p11;
    } else if (kv < kh) {  // r_v + r_h <= n: both detectors can fire
        p01 = cdf.le(kv);
        p11 = cdf.le(kh) - p01;
        p10 = 1.0 - cdf.le(kh);
    } else {
        p01 = cdf.le(kh);
        p00 = cdf.le(kv) - p01;
        p10 = 1.0 - cdf.le(kv);
    }
    return probcore::FiniteDistribution(outcome_labels(), {p00, p01, p10, p11});
}

class DetailedConditionalTable {
public:
    explicit DetailedConditionalTable(const DetailedModelParams& params)
        : params_(params), n_max_(params.resolved_n_max()) {}

    probcore::FiniteDistribution row(unsigned n, unsigned r_v, unsigned r_h, bool s_v,
                                     bool s_h) const {
        if (n > n_max_)
            throw std::invalid_argument("DetailedConditionalTable: n exceeds n_max");
        return detailed_conditional_row(cdf(n), r_v, r_h, s_v, s_h);
    }

    const BinomialHalfCdf& cdf(unsigned n) const {
        auto it = cache_.find(n);
        if (it == cache_.end()) it = cache_.emplace(n, BinomialHalfCdf(n)).first;
        return it->second;
    }

    unsigned n_max() const { return n_max_; }
    const DetailedModelParams& params() const { return params_; }

private:
    DetailedModelParams params_;
    unsigned n_max_;
    mutable std::unordered_map<unsigned, BinomialHalfCdf> cache_;
};

inline DetailedConditionalTable conditional_table_detailed(const DetailedModelParams& params) {
    return DetailedConditionalTable(params);
}

struct PxSolution {
    double p_x = 0.0;   // stationary P(x_{v,h} = 1)
    double p_det = 0.0; // probability of a photon-induced click per detector
    double p_s1 = 0.0;  // P_S(s = 1) at the stationary point
};

// Stationary single-detector click probability. p_det comes from the
// Poisson/threshold sums; p_x solves
//   p = 1 - (1 - p_dark)(1 - gamma p)(1 - delta p)(1 - p_det)
// which is quadratic in p with a unique root in [0,1].
inline PxSolution solve_px(const DetailedModelParams& params) {
    params.validate();
    const unsigned n_max = params.resolved_n_max();
    const auto w = poisson_weights(params.alpha2, n_max);
    const double mu = params.mu;

    double p_det = 0.0;
    for (unsigned n = 1; n <= n_max; ++n) {
        BinomialHalfCdf cdf(n);
        double inner = 0.0;
        double wr = mu;  // P_R(r) = mu (1-mu)^{r-1}
        for (unsigned r = 1; r <= n; ++r) {
            inner += wr * (1.0 - cdf.le(static_cast<long>(r) - 1));
            wr *= 1.0 - mu;
        }
        p_det += w.pmf[n] * inner;
    }

    const double k = (1.0 - params.p_dark) * (1.0 - p_det);
    const double a = k * params.gamma * params.delta;
    const double b = 1.0 - k * (params.gamma + params.delta);
    const double c = k - 1.0;
    double p_x;
    if (a == 0.0) {
        p_x = -c / b;
    } else {
        double disc = b * b - 4.0 * a * c;
        p_x = (-b + std::sqrt(disc)) / (2.0 * a);
    }
    if (!(p_x >= 0.0 && p_x <= 1.0))
        throw std::runtime_error("solve_px: no root in [0,1]");

    PxSolution sol;
    sol.p_x = p_x;
    sol.p_det = p_det;
    sol.p_s1 = 1.0 - (1.0 - params.p_dark) * (1.0 - params.gamma * p_x) *
               (1.0 - params.delta * p_x);
    double residual = sol.p_s1 + (1.0 - sol.p_s1) * p_det - p_x;
    if (std::abs(residual) > 1e-10)
        throw std::runtime_error("solve_px: fixed-point residual too large");
    return sol;
}

// Precomputed side-information aggregates for the detailed model. The
// adversarial joint P_{S_v S_h} is parameterized by y = P(1,1) with marginals
// pinned to p = P_S(1):
//   P(1,1) = y, P(1,0) = P(0,1) = p - y, P(0,0) = 1 - 2p + y,
// with y in [max(0, 2p-1), p].
class DetailedEvaluator {
public:
    explicit DetailedEvaluator(const DetailedModelParams& params)
        : params_(params), n_max_(params.resolved_n_max()),
          weights_(poisson_weights(params.alpha2, n_max_)), px_(solve_px(params)) {
        const double mu = params_.mu;
        for (unsigned n = 0; n <= n_max_; ++n) {
            const double pn = weights_.pmf[n];
            if (pn == 0.0) continue;
            BinomialHalfCdf cdf(n);
            // threshold weights, r = n+1 lumps the geometric tail (1-mu)^n
            std::vector<double> wr(n + 2);
            double g = mu;
            double lump = 1.0;
            for (unsigned r = 1; r <= n; ++r) {
                wr[r] = g;
                lump -= g;
                g *= 1.0 - mu;
            }
            wr[n + 1] = std::max(0.0, lump);

            double g_single = 0.0, h_single = 0.0;
            for (unsigned r = 1; r <= n + 1; ++r) {
                double q = cdf.le(static_cast<long>(r) - 1);  // P(x from photons = 0)
                g_single += wr[r] * std::max(q, 1.0 - q);
                h_single += wr[r] * probcore::binary_entropy(q);
            }

            double g_both = 0.0, h_both = 0.0;
            for (unsigned rv = 1; rv <= n + 1; ++rv) {
                for (unsigned rh = 1; rh <= n + 1; ++rh) {
                    double wgt = wr[rv] * wr[rh];
                    if (wgt == 0.0) continue;
                    auto row = detailed_conditional_row(cdf, rv, rh, false, false);
                    double best = 0.0, ent = 0.0;
                    for (double p : row.probs()) {
                        best = std::max(best, p);
                        if (p > 0.0) ent -= p * std::log2(p);
                    }
                    g_both += wgt * best;
                    h_both += wgt * ent;
                }
            }

            sum_pn_ += pn;
            g1_ += pn * g_single;
            g0_ += pn * g_both;
            h1_ += pn * h_single;
            h0_ += pn * h_both;
        }
        y_lo_ = std::max(0.0, 2.0 * px_.p_s1 - 1.0);
        y_hi_ = px_.p_s1;
    }

    // Guessing probability sum for a given adversarial y.
    double guessing_sum(double y) const {
        const double p = px_.p_s1;
        return y * sum_pn_ + 2.0 * (p - y) * g1_ + (1.0 - 2.0 * p + y) * g0_;
    }

    // H(X | N S R) for a given adversarial y.
    double shannon_sum(double y) const {
        const double p = px_.p_s1;
        return 2.0 * (p - y) * h1_ + (1.0 - 2.0 * p + y) * h0_;
    }

    double y_lo() const { return y_lo_; }
    double y_hi() const { return y_hi_; }
    const PxSolution& px() const { return px_; }
    double truncation_error() const { return weights_.tail; }

    EntropyReport report() const {
        double y_star = y_lo_;
        if (y_hi_ > y_lo_) {
            const unsigned grid = std::max(2u, params_.y_grid);
            double best_y = y_lo_;
            double best_f = objective(y_lo_);
            for (unsigned i = 1; i < grid; ++i) {
                double y = y_lo_ + (y_hi_ - y_lo_) * i / (grid - 1);
                double f = objective(y);
                if (f < best_f) {
                    best_f = f;
                    best_y = y;
                }
            }
            double step = (y_hi_ - y_lo_) / (grid - 1);
            y_star = golden_section(std::max(y_lo_, best_y - step),
                                    std::min(y_hi_, best_y + step));
            if (objective(best_y) < objective(y_star)) y_star = best_y;
        }
        EntropyReport r;
        r.hmin_cond = std::max(0.0, objective(y_star));
        r.shannon_cond = shannon_sum(y_star);
        double worst = std::max(px_.p_x, 1.0 - px_.p_x);
        r.hmin_uncond = std::max(0.0, -2.0 * std::log2(worst));
        r.y_star = y_star;
        r.truncation_error = weights_.tail;
        return r;
    }

private:
    double objective(double y) const { return -std::log2(guessing_sum(y)); }

    double golden_section(double lo, double hi) const {
        constexpr double inv_phi = 0.6180339887498949;
        double a = lo, b = hi;
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = objective(x1), f2 = objective(x2);
        while (b - a > 1e-10) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = objective(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = objective(x2);
            }
        }
        double mid = 0.5 * (a + b);
        return objective(mid) <= std::min(f1, f2) ? mid : (f1 <= f2 ? x1 : x2);
    }

    DetailedModelParams params_;
    unsigned n_max_;
    PoissonWeights weights_;
    PxSolution px_;
    double sum_pn_ = 0.0;
    double g1_ = 0.0, g0_ = 0.0;
    double h1_ = 0.0, h0_ = 0.0;
    double y_lo_ = 0.0, y_hi_ = 0.0;
};

inline EntropyReport entropy_report_detailed(const DetailedModelParams& params) {
    return DetailedEvaluator(params).report();
}

// Half-length pulse re-analysis: two time slots per pulse period, each with
// half the intensity. Ignores correlations between slots.
inline double arrival_time_rate(const DetailedModelParams& params) {
    params.validate();
    DetailedModelParams half = params;
    half.alpha2 = params.alpha2 / 2.0;
    half.n_max = 0;
    return 2.0 * entropy_report_detailed(half).hmin_cond;
}

}  // namespace qrng::models
