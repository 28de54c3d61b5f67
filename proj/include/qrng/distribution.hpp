#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qrng::probcore {

inline constexpr double normalization_tolerance = 1e-12;

// h(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0.
inline double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("binary_entropy: argument outside [0,1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

// Probability distribution over a finite, labelled alphabet. Inputs outside
// the declared sum tolerance are rejected, never renormalized.
class FiniteDistribution {
public:
    FiniteDistribution(std::vector<std::string> labels, std::vector<double> probs,
                       double sum_tolerance = normalization_tolerance)
        : labels_(std::move(labels)), probs_(std::move(probs)) {
        if (labels_.empty())
            throw std::invalid_argument("FiniteDistribution: empty alphabet");
        if (labels_.size() != probs_.size())
            throw std::invalid_argument("FiniteDistribution: labels/probs length mismatch");
        double sum = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0))
                throw std::invalid_argument("FiniteDistribution: negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > sum_tolerance)
            throw std::invalid_argument("FiniteDistribution: probabilities sum to " +
                                        std::to_string(sum) + ", not 1");
        auto sorted = labels_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("FiniteDistribution: duplicate label");
    }

    std::size_t size() const { return probs_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& probs() const { return probs_; }
    double prob(std::size_t i) const { return probs_.at(i); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }

    double prob_of(const std::string& label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end())
            throw std::invalid_argument("FiniteDistribution: unknown label " + label);
        return probs_[static_cast<std::size_t>(it - labels_.begin())];
    }

private:
    std::vector<std::string> labels_;
    std::vector<double> probs_;
};

// Joint distribution over (x, c) with x-major storage. Marginalizing either
// index yields a valid FiniteDistribution.
class JointDistribution {
public:
    JointDistribution(std::vector<std::string> x_labels, std::vector<std::string> c_labels,
                      std::vector<double> probs,
                      double sum_tolerance = normalization_tolerance)
        : x_labels_(std::move(x_labels)), c_labels_(std::move(c_labels)),
          probs_(std::move(probs)) {
        if (x_labels_.empty() || c_labels_.empty())
            throw std::invalid_argument("JointDistribution: empty alphabet");
        if (probs_.size() != x_labels_.size() * c_labels_.size())
            throw std::invalid_argument("JointDistribution: matrix size mismatch");
        double sum = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0))
                throw std::invalid_argument("JointDistribution: negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > sum_tolerance)
            throw std::invalid_argument("JointDistribution: probabilities sum to " +
                                        std::to_string(sum) + ", not 1");
    }

    std::size_t x_size() const { return x_labels_.size(); }
    std::size_t c_size() const { return c_labels_.size(); }
    const std::vector<std::string>& x_labels() const { return x_labels_; }
    const std::vector<std::string>& c_labels() const { return c_labels_; }
    double prob(std::size_t ix, std::size_t ic) const {
        return probs_.at(ix * c_labels_.size() + ic);
    }

    FiniteDistribution marginal_x(double sum_tolerance = normalization_tolerance) const {
        std::vector<double> m(x_size(), 0.0);
        for (std::size_t ix = 0; ix < x_size(); ++ix)
            for (std::size_t ic = 0; ic < c_size(); ++ic) m[ix] += prob(ix, ic);
        return FiniteDistribution(x_labels_, std::move(m), sum_tolerance);
    }

    FiniteDistribution marginal_c(double sum_tolerance = normalization_tolerance) const {
        std::vector<double> m(c_size(), 0.0);
        for (std::size_t ix = 0; ix < x_size(); ++ix)
            for (std::size_t ic = 0; ic < c_size(); ++ic) m[ic] += prob(ix, ic);
        return FiniteDistribution(c_labels_, std::move(m), sum_tolerance);
    }

private:
    std::vector<std::string> x_labels_;
    std::vector<std::string> c_labels_;
    std::vector<double> probs_;
};

// H_min(X) = -log2 max_x P(x), in bits.
inline double min_entropy(const FiniteDistribution& dist) {
    double max_p = *std::max_element(dist.probs().begin(), dist.probs().end());
    if (max_p <= 0.0)
        throw std::domain_error("min_entropy: degenerate distribution");
    return std::max(0.0, -std::log2(max_p));
}

// H_min(X|C) = -log2 sum_c max_x P(x,c); zero-weight c contributes nothing.
inline double cond_min_entropy(const JointDistribution& joint) {
    double guess = 0.0;
    for (std::size_t ic = 0; ic < joint.c_size(); ++ic) {
        double best = 0.0;
        for (std::size_t ix = 0; ix < joint.x_size(); ++ix)
            best = std::max(best, joint.prob(ix, ic));
        guess += best;
    }
    if (guess <= 0.0)
        throw std::domain_error("cond_min_entropy: degenerate joint distribution");
    return std::max(0.0, -std::log2(guess));
}

inline double shannon_entropy(const FiniteDistribution& dist) {
    double h = 0.0;
    for (double p : dist.probs())
        if (p > 0.0) h -= p * std::log2(p);
    return std::max(0.0, h);
}

// H(X|C) = H(XC) - H(C), with H(C) computed from the column masses directly
// so slightly sub-normalized (truncated) joints stay usable.
inline double cond_shannon(const JointDistribution& joint) {
    double h_xc = 0.0;
    for (std::size_t ix = 0; ix < joint.x_size(); ++ix)
        for (std::size_t ic = 0; ic < joint.c_size(); ++ic) {
            double p = joint.prob(ix, ic);
            if (p > 0.0) h_xc -= p * std::log2(p);
        }
    double h_c = 0.0;
    for (std::size_t ic = 0; ic < joint.c_size(); ++ic) {
        double pc = 0.0;
        for (std::size_t ix = 0; ix < joint.x_size(); ++ix) pc += joint.prob(ix, ic);
        if (pc > 0.0) h_c -= pc * std::log2(pc);
    }
    return std::max(0.0, h_xc - h_c);
}

// Trace distance (1/2) sum_x |p(x) - q(x)| over a shared alphabet.
inline double l1_distance(const FiniteDistribution& p, const FiniteDistribution& q) {
    if (p.labels() != q.labels())
        throw std::invalid_argument("l1_distance: mismatched alphabets");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        d += std::abs(p.prob(i) - q.prob(i));
    return 0.5 * d;
}

}  // namespace qrng::probcore
