#pragma once

#include <optional>
#include <stdexcept>

#include "qrng/poisson.hpp"

namespace qrng::models {

// Simplified device: detectors click with constant probability mu when one
// or more photons arrive. n_max = 0 selects automatic Poisson truncation.
struct SimpleModelParams {
    double alpha2 = 1.0;
    double mu = 0.1;
    unsigned n_max = 0;

    void validate() const {
        if (!(alpha2 >= 0.0))
            throw std::invalid_argument("SimpleModelParams: alpha2 must be >= 0");
        if (!(mu >= 0.0 && mu <= 1.0))
            throw std::invalid_argument("SimpleModelParams: mu must be in [0,1]");
    }

    unsigned resolved_n_max() const {
        validate();
        return n_max == 0 ? poisson_n_max(alpha2) : n_max;
    }
};

// Detailed device: per-photon detection threshold plus dark counts,
// afterpulses and crosstalk.
struct DetailedModelParams {
    double alpha2 = 1.0;
    double mu = 0.1;
    double p_dark = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    unsigned n_max = 0;
    unsigned y_grid = 1024;

    void validate() const {
        if (!(alpha2 >= 0.0))
            throw std::invalid_argument("DetailedModelParams: alpha2 must be >= 0");
        if (!(mu >= 0.0 && mu <= 1.0))
            throw std::invalid_argument("DetailedModelParams: mu must be in [0,1]");
        if (!(p_dark >= 0.0 && p_dark < 1.0))
            throw std::invalid_argument("DetailedModelParams: p_dark must be in [0,1)");
        if (!(gamma >= 0.0 && gamma < 1.0))
            throw std::invalid_argument("DetailedModelParams: gamma must be in [0,1)");
        if (!(delta >= 0.0 && delta < 1.0))
            throw std::invalid_argument("DetailedModelParams: delta must be in [0,1)");
        if (y_grid < 2)
            throw std::invalid_argument("DetailedModelParams: y_grid must be >= 2");
    }

    unsigned resolved_n_max() const {
        validate();
        return n_max == 0 ? poisson_n_max(alpha2) : n_max;
    }
};

struct EntropyReport {
    double hmin_cond = 0.0;     // H_min(X | side information), bits per pulse
    double shannon_cond = 0.0;  // H(X | side information), bits per pulse
    double hmin_uncond = 0.0;   // H_min(X), bits per pulse
    std::optional<double> y_star;
    double truncation_error = 0.0;
};

}  // namespace qrng::models
