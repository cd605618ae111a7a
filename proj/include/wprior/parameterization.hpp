#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace wprior {

/// An open interval (lo, hi); either end may be infinite.
struct Interval {
    double lo;
    double hi;
    bool contains(double x) const { return x > lo && x < hi; }
};

/// A point in the continuous parameter block of one family at a given
/// complexity. The complexity K is the length of `values`.
struct Parameterization {
    std::string family_id;
    std::vector<double> values;

    std::size_t complexity() const { return values.size(); }
    double norm() const;
};

inline double Parameterization::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s == 0.0 ? 0.0 : std::sqrt(s);
}

}  // namespace wprior
