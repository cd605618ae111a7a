#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wprior/dataset.hpp"
#include "wprior/family.hpp"

#include "json.hpp"

namespace wprior {

/// Free energy at complexity k: minus the maximized log-likelihood plus k.
double g_k(const ModelFamily& family, const Dataset& data, int k);

/// The information criterion is g_k itself; both names call one function so
/// the identity is structural, not numerical.
inline double aic(const ModelFamily& family, const Dataset& data, int k) {
    return g_k(family, data, k);
}

struct ComplexityRow {
    int k = 0;
    double log_z_k = 0.0;   // = -g_k
    double g_k = 0.0;
    double aic_k = 0.0;
    double weight = 0.0;
    bool mle_clamped = false;
};

struct ComplexityReport {
    std::vector<ComplexityRow> rows;
    double total_log_z = 0.0;   // log sum_k exp(-g_k)
    int k_max = 0;
    double tail_share = 0.0;    // relative weight of the last complexity
    bool truncation_warning = false;
    std::optional<double> g0;   // empty-model row, excluded from the total
    std::size_t n_obs = 0;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

/// Per-complexity free energies, overflow-safe total, normalized weights and
/// the truncation-tail share. The optional empty-model row uses the family's
/// fixed reference density and never enters the total.
ComplexityReport total_partition(const ModelFamily& family, const Dataset& data, int k_max,
                                 bool include_null_row = false);

struct DensityOfModels {
    double value = 0.0;            // sqrt(det I) (n/2pi)^(K/2) D^(-K/2), unit constant
    double fisher_min_eigenvalue = 0.0;  // regularity diagnostic
};

/// Density of distinguishable models at theta0 for n observations and
/// distinguishability cutoff d_ball (proportionality constant fixed to 1).
DensityOfModels density_of_models(const ModelFamily& family, const Parameterization& theta0,
                                  double n_obs, double d_ball);

struct GridSpec {
    std::size_t points_per_dim = 4001;  // odd, so theta0 is a grid point
};

struct KlBallVolume {
    double volume = 0.0;
    bool partial = false;   // ball clipped by the parameter-domain boundary
    std::size_t grid_points = 0;
};

/// Grid-integrated volume of {theta : n_obs * D(theta0 || theta) <= d_ball},
/// with the grid auto-expanded until the indicator vanishes on the boundary
/// shell (K <= 2).
KlBallVolume kl_ball_volume(const ModelFamily& family, const Parameterization& theta0,
                            double n_obs, double d_ball, const GridSpec& grid = {});

}  // namespace wprior
