#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace wprior {

/// A Monte Carlo scalar: point value, standard error of the mean, sample
/// count and the stream key it was computed from.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t n_excluded = 0;   // non-finite samples dropped
    std::string bias_note;

    /// |mean| measured in standard errors (infinite when std_error is 0).
    double z_score() const {
        if (std_error > 0.0) return std::abs(mean) / std_error;
        return mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
};

}  // namespace wprior
