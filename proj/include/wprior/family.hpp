#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wprior/dataset.hpp"
#include "wprior/parameterization.hpp"
#include "wprior/rng.hpp"

namespace wprior {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Optimizer gave up; carries the best parameterization found so far.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, Parameterization best)
        : std::runtime_error(what), best_found(std::move(best)) {}
    Parameterization best_found;
};

struct MleResult {
    Parameterization value;
    double log_likelihood = 0.0;
    bool clamped = false;   // a degenerate estimate was clamped into the open domain
};

/// A parametric family q(x|theta): per-point log-density, sampler, Fisher
/// information, KL divergence and maximum-likelihood estimation. Families
/// are immutable and safe to share across parallel workers; sampling always
/// goes through an explicitly passed stream.
class ModelFamily {
public:
    virtual ~ModelFamily() = default;

    virtual std::string id() const = 0;
    virtual ObsSpace obs_space() const = 0;
    /// Inclusive range of supported complexities [k_min, k_max].
    virtual std::pair<int, int> complexity_range() const = 0;
    virtual std::vector<Interval> parameter_domain(int k) const = 0;

    virtual bool has_closed_form_fisher() const { return false; }
    virtual bool has_closed_form_kl() const { return false; }
    virtual bool has_closed_form_mle() const { return false; }

    bool in_domain(const Parameterization& theta) const;
    /// Throws DomainError when theta is outside the open parameter domain.
    void require_in_domain(const Parameterization& theta) const;

    virtual double log_density(const Parameterization& theta, const Observation& x) const = 0;
    virtual Observation sample_one(const Parameterization& theta, RngStream& stream) const = 0;

    /// Sum of per-observation log-densities; -inf when any point has zero
    /// density. Throws DomainError for out-of-domain theta.
    double log_likelihood(const Parameterization& theta, const Dataset& data) const;

    /// n i.i.d. draws; the origin records theta and the stream key.
    Dataset sample(const Parameterization& theta, std::size_t n, RngStream& stream) const;

    /// K x K Fisher information. Closed form where the family has one, else
    /// the score-covariance fallback with a fixed internal seed (see
    /// fisher_information_numeric). Throws SingularityError on non-finite
    /// entries.
    virtual Eigen::MatrixXd fisher_information(const Parameterization& theta) const;

    /// Score-covariance estimate of the Fisher information: covariance of the
    /// central-difference score over n_draws samples from q(.|theta).
    Eigen::MatrixXd fisher_information_numeric(const Parameterization& theta, std::size_t n_draws,
                                               RngStream stream) const;

    /// Smallest eigenvalue of the Fisher information; regularity diagnostic.
    double fisher_min_eigenvalue(const Parameterization& theta) const;

    /// KL divergence D(theta1 || theta2) over the observation space. Closed
    /// form where available, else quadrature (scalar), exact sum (binary) or
    /// Monte Carlo with a fixed internal seed (pair). Support mismatch is
    /// reported as +inf, not an error.
    virtual double kl_divergence(const Parameterization& theta1, const Parameterization& theta2) const;

    /// Maximum-likelihood fit at complexity k. Closed form where available,
    /// else multistart Nelder-Mead around a moment-matched initial guess;
    /// ties broken by smallest parameter norm. Throws ConvergenceError with
    /// the best-found parameterization when the optimizer fails.
    virtual MleResult mle(const Dataset& data, int k) const;

    /// Moment-matched starting point for the generic optimizer.
    virtual Parameterization initial_guess(const Dataset& data, int k) const;

    /// Embeds theta into complexity k (nested families only).
    virtual Parameterization embed(const Parameterization& theta, int k) const;

    /// Hessian of the log-likelihood at theta (closed form per family).
    virtual Eigen::MatrixXd loglik_hessian(const Parameterization& theta, const Dataset& data) const;

    /// Interval containing essentially all mass of q(.|theta) (scalar
    /// observation spaces; used by numeric KL and normalization checks).
    virtual Interval observation_hull(const Parameterization& theta) const;

    /// Central-difference score of log q(x|theta) in theta.
    Eigen::VectorXd score_numeric(const Parameterization& theta, const Observation& x) const;

protected:
    Parameterization make_param(std::vector<double> values) const;
};

/// Registry of the shipped families, addressable by string id:
/// "gauss_mean", "gauss_mv", "bernoulli", "exponential", "poly".
const ModelFamily& family_registry(const std::string& id);
std::vector<std::string> registered_family_ids();

}  // namespace wprior
