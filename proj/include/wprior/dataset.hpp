#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wprior/parameterization.hpp"

namespace wprior {

enum class ObsSpace { RealScalar, Binary, RealPair };

/// One observation. Scalar and binary families use `x`; regression families
/// use the (x, y) pair.
struct Observation {
    double x = 0.0;
    double y = 0.0;
};

inline Observation scalar_obs(double x) { return Observation{x, 0.0}; }

/// Provenance of a generated dataset.
struct DatasetOrigin {
    Parameterization true_theta;
    std::uint64_t seed = 0;
};

struct Dataset {
    std::vector<Observation> points;
    std::optional<DatasetOrigin> origin;

    std::size_t n() const { return points.size(); }
    bool empty() const { return points.empty(); }

    /// The first n points, origin preserved.
    Dataset prefix(std::size_t n) const;
    /// Concatenation (i.i.d. data, order irrelevant).
    Dataset concat(const Dataset& other) const;
    Dataset with(const Observation& extra) const;
};

Dataset make_scalar_dataset(const std::vector<double>& xs);

/// One observation per row; regression points as "x,y" pairs.
void write_csv(std::ostream& out, const Dataset& data, ObsSpace space);
void write_csv_file(const std::string& path, const Dataset& data, ObsSpace space);
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);

}  // namespace wprior
