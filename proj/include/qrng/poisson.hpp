#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qrng::models {

inline constexpr unsigned poisson_truncation_cap = 4096;
inline constexpr double poisson_tail_tolerance = 1e-12;

// P_N(n) = e^{-alpha2} alpha2^n / n!, evaluated in log space.
inline double poisson(double alpha2, unsigned n) {
    if (!(alpha2 >= 0.0))
        throw std::invalid_argument("poisson: alpha2 must be >= 0");
    if (alpha2 == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(n) * std::log(alpha2) - alpha2 -
                    std::lgamma(static_cast<double>(n) + 1.0));
}

// Smallest n_max whose tail mass is below the tolerance, capped.
inline unsigned poisson_n_max(double alpha2, double tail_tol = poisson_tail_tolerance,
                              unsigned cap = poisson_truncation_cap) {
    if (!(alpha2 >= 0.0))
        throw std::invalid_argument("poisson_n_max: alpha2 must be >= 0");
    double cum = 0.0;
    for (unsigned n = 0; n <= cap; ++n) {
        cum += poisson(alpha2, n);
        if (1.0 - cum < tail_tol) return n;
    }
    return cap;
}

struct PoissonWeights {
    std::vector<double> pmf;  // index n in [0, n_max]
    double tail;              // discarded mass beyond n_max
};

inline PoissonWeights poisson_weights(double alpha2, unsigned n_max) {
    PoissonWeights w;
    w.pmf.resize(n_max + 1);
    double cum = 0.0;
    for (unsigned n = 0; n <= n_max; ++n) {
        w.pmf[n] = poisson(alpha2, n);
        cum += w.pmf[n];
    }
    w.tail = std::max(0.0, 1.0 - cum);
    return w;
}

}  // namespace qrng::models
