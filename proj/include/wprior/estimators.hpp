#pragma once

#include <string>
#include <vector>

#include "wprior/estimate.hpp"
#include "wprior/evidence.hpp"
#include "wprior/mc.hpp"
#include "wprior/posterior.hpp"

namespace wprior {

struct Budgets {
    std::size_t n_outer = 256;   // dataset replicates
    std::size_t n_inner = 512;   // posterior draws / new-observation draws
    std::size_t n_theta0 = 64;   // true-parameter draws for model-averaged quantities
};

/// Exponents applied to the observation count when continuing it to real
/// values; tau = 1 is the physical point. The 3-point stencil uses the
/// three nodes closest to 1.
struct TemperSchedule {
    std::vector<double> taus{0.9, 0.95, 1.0, 1.05, 1.1};
    int stencil = 5;

    void validate() const;
    std::vector<double> stencil_taus() const;
};

/// Expected log partition function over datasets drawn from theta0.
Estimate performance_post(const ModelFamily& family, const Parameterization& theta0,
                          const Prior& prior, std::size_t n_obs, const Budgets& budgets,
                          const RngStream& stream, EvidenceSpec spec = {});

/// n_obs times the expected log predictive density of a new observation,
/// averaged over training sets and new draws.
Estimate predictivity(const ModelFamily& family, const Parameterization& theta0,
                      const Prior& prior, std::size_t n_obs, const Budgets& budgets,
                      const RngStream& stream, EvidenceSpec spec = {});

struct MultiplicityResult {
    Estimate log_m;
    std::string method;          // "direct" or "cross_validation"
    std::size_t n_obs = 0;
    std::string prior_desc;
    Parameterization theta0;
    std::size_t mcmc_warnings = 0;
};

/// log multiplicity as performance minus predictivity, both terms over the
/// same outer datasets (common random numbers); the standard error is that
/// of the paired difference.
MultiplicityResult multiplicity_direct(const ModelFamily& family, const Parameterization& theta0,
                                       const Prior& prior, std::size_t n_obs,
                                       const Budgets& budgets, const RngStream& stream,
                                       EvidenceSpec spec = {});

/// log multiplicity in cross-validation form: independent dataset pairs
/// (X, Y), parameters drawn from the posterior given Y, the log ratio of
/// prior to posterior density evaluated against X.
MultiplicityResult multiplicity_cv(const ModelFamily& family, const Parameterization& theta0,
                                   const Prior& prior, std::size_t n_obs, const Budgets& budgets,
                                   const RngStream& stream, EvidenceSpec spec = {});

struct EntropyResult {
    Estimate value;
    bool inconclusive = false;       // derivative noise dominates the signal
    std::vector<double> taus;        // schedule actually used
    std::vector<double> realized_n;  // integer observation counts per node
    std::vector<double> free_energy; // disorder-averaged F at each node
};

/// Disorder-averaged Gibbs entropy: minus the temperature derivative of
/// F(T) = -T <log Z(X^N')> at T = 1/n_obs, with the observation count
/// continued through integer prefixes N' = round(tau * n_obs) of a common
/// dataset and the per-dataset baseline sum log q(x_i|theta0) removed (it
/// carries no T dependence in expectation and cancels most of the prefix
/// noise).
EntropyResult gibbs_entropy(const ModelFamily& family, const Parameterization& theta0,
                            const Prior& prior, std::size_t n_obs, const TemperSchedule& schedule,
                            const Budgets& budgets, const RngStream& stream,
                            EvidenceSpec spec = {});

/// Parameter-coding information of the observations under a proper prior:
/// dataset pairs (X, Y), parameters drawn from the posterior given X, the
/// log ratio of the Y-posterior to the prior.
Estimate coding_information(const ModelFamily& family, const Parameterization& theta0,
                            const Prior& proper_prior, std::size_t n_obs, const Budgets& budgets,
                            const RngStream& stream, EvidenceSpec spec = {});

/// coding_information averaged over theta0 drawn from the prior itself.
Estimate avg_coding_information(const ModelFamily& family, const Prior& proper_prior,
                                std::size_t n_obs, const Budgets& budgets,
                                const RngStream& stream, EvidenceSpec spec = {});

struct OptimalityRow {
    std::string name;
    Estimate perf_post;
    Estimate perf_pre;
    std::vector<double> perf_post_values;  // per-replicate, for paired comparisons
    std::vector<double> perf_pre_values;
};

/// Tabulates model-averaged performance and predictivity for each candidate
/// prior, with true parameters drawn from pi0 and identical replicate
/// streams across candidates.
std::vector<OptimalityRow> true_prior_optimality(
    const ModelFamily& family, const Prior& pi0,
    const std::vector<std::pair<std::string, Prior>>& candidates, std::size_t n_obs,
    const Budgets& budgets, const RngStream& stream, EvidenceSpec spec = {});

/// Mean and standard error of the per-replicate differences a - b.
Estimate paired_difference(const std::vector<double>& a, const std::vector<double>& b,
                           const RngStream& stream);

}  // namespace wprior
