#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wprior/family.hpp"
#include "wprior/parameterization.hpp"
#include "wprior/rng.hpp"

namespace wprior {

class NormalizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed box used to normalize improper priors; N_Theta is the prior mass
/// over this region.
struct TruncationDomain {
    std::vector<Interval> box;

    bool contains(const Parameterization& theta) const;
    double log_volume() const;
    /// The box with every side stretched by `factor` about its center.
    TruncationDomain scaled_about_center(double factor) const;
};

enum class PriorKind { Flat, Jeffreys, WPrior, Gaussian, Perturbed, Custom };

/// A possibly-improper density on the parameter block of one family.
/// Immutable value object; the family pointer refers to a registry
/// singleton or an object outliving the prior.
class Prior {
public:
    const ModelFamily* family = nullptr;
    int complexity = 1;
    PriorKind kind = PriorKind::Flat;
    double scale_log = 0.0;                    // additive log-constant, exact
    std::optional<double> built_for_n;         // recorded by the w-prior
    std::vector<double> params;                // Gaussian: mean/variance pairs; Perturbed: eps, omega, phase
    std::optional<TruncationDomain> domain;    // set for truncated (proper) priors
    double log_normalizer = 0.0;               // log N_Theta once normalized
    bool is_proper = false;
    std::function<double(const Parameterization&)> custom_log_density;
    std::shared_ptr<const Prior> base;         // wrapped prior for Perturbed

    /// Full log-density: base + scale_log - log_normalizer; -inf outside the
    /// truncation domain when one is set.
    double log_density(const Parameterization& theta) const;

    /// Density without scale, normalization or domain restriction.
    double shape_log_density(const Parameterization& theta) const;

    /// The same prior multiplied by exp(log_c).
    Prior scaled(double log_c) const;

    /// Short config-style description ("wprior", "flat*2", ...).
    std::string describe() const;
};

Prior flat_prior(const ModelFamily& family, int k, double scale_log = 0.0);

/// Log-density 0.5 * log det I(theta); improper in general.
Prior jeffreys_prior(const ModelFamily& family, int k);

/// Jeffreys density times (n/2pi)^(K/2) exp(-K); records n for later
/// mismatch detection.
Prior w_prior_regular(const ModelFamily& family, int k, double n_obs);

/// Proper independent Gaussian prior over the parameter block;
/// moments[i] = {mean_i, variance_i}.
Prior gaussian_prior(const ModelFamily& family, int k,
                     const std::vector<std::pair<double, double>>& moments);

/// Multiplies `base` by (1 + eps * sin(omega * sum(theta) + phase)); |eps|<1
/// keeps the density positive. Used for stationarity probes.
Prior perturbed_prior(const Prior& base, double eps, double omega, double phase);
Prior perturbed_prior(const Prior& base, double eps, RngStream& stream);

/// Restricts the prior to the domain and divides by its mass there.
/// Returns the proper prior and log N_Theta. Quadrature for K <= 2, Monte
/// Carlo over the box otherwise.
std::pair<Prior, double> normalize(const Prior& prior, const TruncationDomain& domain);

/// Per-family default normalization boxes, wide enough that boundary mass is
/// negligible in all shipped experiments.
TruncationDomain default_truncation(const ModelFamily& family, int k);

/// Per-K w-priors covering the whole complexity range of a nested family.
std::vector<Prior> w_prior_over_complexities(const ModelFamily& family, double n_obs);

/// Builds a prior from a config string: "flat", "jeffreys", "wprior",
/// "flat*<c>" (scaled, likewise for the others), "gauss:<mean>,<var>".
Prior parse_prior_spec(const ModelFamily& family, int k, double n_obs, const std::string& spec);

/// Draws from a proper prior (direct for Gaussian, grid-envelope rejection
/// for K <= 2 otherwise).
Parameterization sample_prior(const Prior& prior, RngStream& stream);

}  // namespace wprior
