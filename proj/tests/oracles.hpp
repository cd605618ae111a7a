// Test-only oracles, implemented independently of the library paths they
// check.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "wprior/family.hpp"
#include "wprior/rng.hpp"

namespace oracles {

/// Monte Carlo covariance of the central-difference score over draws from
/// q(.|theta). Independent of the library fallback (its own step size and
/// accumulation).
inline Eigen::MatrixXd score_covariance(const wprior::ModelFamily& family,
                                        const wprior::Parameterization& theta,
                                        std::size_t n_draws, std::uint64_t seed) {
    const int k = static_cast<int>(theta.complexity());
    wprior::RngStream stream(seed);
    std::vector<Eigen::VectorXd> scores;
    scores.reserve(n_draws);
    for (std::size_t d = 0; d < n_draws; ++d) {
        const wprior::Observation x = family.sample_one(theta, stream);
        Eigen::VectorXd s(k);
        for (int i = 0; i < k; ++i) {
            const double h = 2e-6 * (1.0 + std::abs(theta.values[i]));
            wprior::Parameterization hi = theta, lo = theta;
            hi.values[i] += h;
            lo.values[i] -= h;
            s(i) = (family.log_density(hi, x) - family.log_density(lo, x)) / (2.0 * h);
        }
        scores.push_back(s);
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
    for (const auto& s : scores) mean += s;
    mean /= static_cast<double>(n_draws);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
    for (const auto& s : scores) cov += (s - mean) * (s - mean).transpose();
    return cov / static_cast<double>(n_draws);
}

/// Trapezoid integral of q1 log(q1/q2) over the hull of theta1 (scalar
/// observation spaces).
inline double kl_by_quadrature(const wprior::ModelFamily& family,
                               const wprior::Parameterization& theta1,
                               const wprior::Parameterization& theta2, int n_points = 400001) {
    const wprior::Interval hull = family.observation_hull(theta1);
    const double step = (hull.hi - hull.lo) / (n_points - 1);
    double acc = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double x = hull.lo + step * i;
        const double l1 = family.log_density(theta1, wprior::scalar_obs(x));
        if (!std::isfinite(l1)) continue;
        const double l2 = family.log_density(theta2, wprior::scalar_obs(x));
        const double w = (i == 0 || i == n_points - 1) ? 0.5 : 1.0;
        acc += w * std::exp(l1) * (l1 - l2);
    }
    return acc * step;
}

/// Simple trapezoid quadrature of f over [lo, hi].
inline double integrate(const std::function<double(double)>& f, double lo, double hi,
                        int n_points = 200001) {
    const double step = (hi - lo) / (n_points - 1);
    double acc = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i + 1 < n_points; ++i) acc += f(lo + step * i);
    return acc * step;
}

/// Exponential observations parameterized by the log rate; Fisher
/// information is identically 1. Shared by the reparameterization tests.
class LogRateExpFamily final : public wprior::ModelFamily {
public:
    std::string id() const override { return "exp_lograte_test"; }
    wprior::ObsSpace obs_space() const override { return wprior::ObsSpace::RealScalar; }
    std::pair<int, int> complexity_range() const override { return {1, 1}; }
    std::vector<wprior::Interval> parameter_domain(int) const override {
        return {{-std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()}};
    }
    bool has_closed_form_fisher() const override { return true; }
    double log_density(const wprior::Parameterization& theta,
                       const wprior::Observation& x) const override {
        if (x.x <= 0.0) return -std::numeric_limits<double>::infinity();
        return theta.values[0] - std::exp(theta.values[0]) * x.x;
    }
    wprior::Observation sample_one(const wprior::Parameterization& theta,
                                   wprior::RngStream& s) const override {
        return wprior::scalar_obs(s.exponential(std::exp(theta.values[0])));
    }
    Eigen::MatrixXd fisher_information(const wprior::Parameterization& theta) const override {
        require_in_domain(theta);
        return Eigen::MatrixXd::Identity(1, 1);
    }
    wprior::Parameterization initial_guess(const wprior::Dataset& data, int) const override {
        double mean = 0.0;
        for (const wprior::Observation& p : data.points) mean += p.x;
        mean /= static_cast<double>(data.n());
        return wprior::Parameterization{id(), {std::log(1.0 / mean)}};
    }
    wprior::Interval observation_hull(const wprior::Parameterization& theta) const override {
        return {1e-12, 45.0 * std::exp(-theta.values[0])};
    }
};

}  // namespace oracles
