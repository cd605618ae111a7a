#pragma once

#include "wprior/family.hpp"

namespace wprior {

/// Gaussian with known variance; the single parameter is the mean.
class GaussMeanFamily final : public ModelFamily {
public:
    explicit GaussMeanFamily(double variance = 1.0);

    std::string id() const override { return "gauss_mean"; }
    ObsSpace obs_space() const override { return ObsSpace::RealScalar; }
    std::pair<int, int> complexity_range() const override { return {1, 1}; }
    std::vector<Interval> parameter_domain(int k) const override;
    bool has_closed_form_fisher() const override { return true; }
    bool has_closed_form_kl() const override { return true; }
    bool has_closed_form_mle() const override { return true; }

    double log_density(const Parameterization& theta, const Observation& x) const override;
    Observation sample_one(const Parameterization& theta, RngStream& stream) const override;
    Eigen::MatrixXd fisher_information(const Parameterization& theta) const override;
    double kl_divergence(const Parameterization& a, const Parameterization& b) const override;
    MleResult mle(const Dataset& data, int k) const override;
    Parameterization initial_guess(const Dataset& data, int k) const override;
    Eigen::MatrixXd loglik_hessian(const Parameterization& theta, const Dataset& data) const override;
    Interval observation_hull(const Parameterization& theta) const override;

    double variance() const { return variance_; }

private:
    double variance_;
};

/// Gaussian with unknown mean and variance, theta = (mean, variance).
class GaussMeanVarFamily final : public ModelFamily {
public:
    std::string id() const override { return "gauss_mv"; }
    ObsSpace obs_space() const override { return ObsSpace::RealScalar; }
    std::pair<int, int> complexity_range() const override { return {2, 2}; }
    std::vector<Interval> parameter_domain(int k) const override;
    bool has_closed_form_fisher() const override { return true; }
    bool has_closed_form_kl() const override { return true; }
    bool has_closed_form_mle() const override { return true; }

    double log_density(const Parameterization& theta, const Observation& x) const override;
    Observation sample_one(const Parameterization& theta, RngStream& stream) const override;
    Eigen::MatrixXd fisher_information(const Parameterization& theta) const override;
    double kl_divergence(const Parameterization& a, const Parameterization& b) const override;
    MleResult mle(const Dataset& data, int k) const override;
    Parameterization initial_guess(const Dataset& data, int k) const override;
    Eigen::MatrixXd loglik_hessian(const Parameterization& theta, const Dataset& data) const override;
    Interval observation_hull(const Parameterization& theta) const override;
};

class BernoulliFamily final : public ModelFamily {
public:
    std::string id() const override { return "bernoulli"; }
    ObsSpace obs_space() const override { return ObsSpace::Binary; }
    std::pair<int, int> complexity_range() const override { return {1, 1}; }
    std::vector<Interval> parameter_domain(int k) const override;
    bool has_closed_form_fisher() const override { return true; }
    bool has_closed_form_kl() const override { return true; }
    bool has_closed_form_mle() const override { return true; }

    double log_density(const Parameterization& theta, const Observation& x) const override;
    Observation sample_one(const Parameterization& theta, RngStream& stream) const override;
    Eigen::MatrixXd fisher_information(const Parameterization& theta) const override;
    double kl_divergence(const Parameterization& a, const Parameterization& b) const override;
    MleResult mle(const Dataset& data, int k) const override;
    Parameterization initial_guess(const Dataset& data, int k) const override;
    Eigen::MatrixXd loglik_hessian(const Parameterization& theta, const Dataset& data) const override;
};

/// Exponential with rate parameter lambda.
class ExponentialFamily final : public ModelFamily {
public:
    std::string id() const override { return "exponential"; }
    ObsSpace obs_space() const override { return ObsSpace::RealScalar; }
    std::pair<int, int> complexity_range() const override { return {1, 1}; }
    std::vector<Interval> parameter_domain(int k) const override;
    bool has_closed_form_fisher() const override { return true; }
    bool has_closed_form_kl() const override { return true; }
    bool has_closed_form_mle() const override { return true; }

    double log_density(const Parameterization& theta, const Observation& x) const override;
    Observation sample_one(const Parameterization& theta, RngStream& stream) const override;
    Eigen::MatrixXd fisher_information(const Parameterization& theta) const override;
    double kl_divergence(const Parameterization& a, const Parameterization& b) const override;
    MleResult mle(const Dataset& data, int k) const override;
    Parameterization initial_guess(const Dataset& data, int k) const override;
    Eigen::MatrixXd loglik_hessian(const Parameterization& theta, const Dataset& data) const override;
    Interval observation_hull(const Parameterization& theta) const override;
};

/// Nested polynomial regression with Gaussian noise of known variance.
/// An observation is a pair (x, y) with x uniform on (-1, 1) and
/// y = sum_j theta_j x^j + noise. Complexity is the number of coefficients.
class PolynomialFamily final : public ModelFamily {
public:
    explicit PolynomialFamily(int k_max = 10, double noise_variance = 1.0);

    std::string id() const override { return "poly"; }
    ObsSpace obs_space() const override { return ObsSpace::RealPair; }
    std::pair<int, int> complexity_range() const override { return {1, k_max_}; }
    std::vector<Interval> parameter_domain(int k) const override;
    bool has_closed_form_fisher() const override { return true; }
    bool has_closed_form_kl() const override { return true; }
    bool has_closed_form_mle() const override { return true; }

    double log_density(const Parameterization& theta, const Observation& x) const override;
    Observation sample_one(const Parameterization& theta, RngStream& stream) const override;
    Eigen::MatrixXd fisher_information(const Parameterization& theta) const override;
    double kl_divergence(const Parameterization& a, const Parameterization& b) const override;
    MleResult mle(const Dataset& data, int k) const override;
    Parameterization initial_guess(const Dataset& data, int k) const override;
    Parameterization embed(const Parameterization& theta, int k) const override;
    Eigen::MatrixXd loglik_hessian(const Parameterization& theta, const Dataset& data) const override;

    double noise_variance() const { return noise_variance_; }
    /// Log-density of the empty (no coefficient) reference model.
    double null_model_log_density(const Observation& p) const;
    /// Moment matrix of the covariate distribution up to order k-1, i.e.
    /// M(i, j) = E[x^(i+j)] for x uniform on (-1, 1).
    Eigen::MatrixXd covariate_moments(int k) const;

private:
    double predict(const Parameterization& theta, double x) const;

    int k_max_;
    double noise_variance_;
};

}  // namespace wprior
