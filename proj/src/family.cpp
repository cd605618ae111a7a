#include "wprior/family.hpp"

#include <cmath>
#include <limits>

#include "wprior/families.hpp"
#include "wprior/math.hpp"
#include "wprior/optimize.hpp"

namespace wprior {

namespace {
constexpr std::uint64_t kInternalFisherSeed = 0x57A715F15Eull;
constexpr std::uint64_t kInternalKlSeed = 0x57A715D1Full;
constexpr double kInf = std::numeric_limits<double>::infinity();

double fd_step(double v) { return 1e-5 * (1.0 + std::abs(v)); }
}  // namespace

bool ModelFamily::in_domain(const Parameterization& theta) const {
    const int k = static_cast<int>(theta.complexity());
    const auto [k_min, k_max] = complexity_range();
    if (k < k_min || k > k_max) return false;
    const auto domain = parameter_domain(k);
    for (std::size_t i = 0; i < theta.values.size(); ++i) {
        if (!std::isfinite(theta.values[i])) return false;
        if (!domain[i].contains(theta.values[i])) return false;
    }
    return true;
}

void ModelFamily::require_in_domain(const Parameterization& theta) const {
    if (!in_domain(theta))
        throw DomainError("parameterization outside the open domain of family " + id());
}

double ModelFamily::log_likelihood(const Parameterization& theta, const Dataset& data) const {
    require_in_domain(theta);
    if (data.empty()) throw std::invalid_argument("log_likelihood: empty dataset");
    double acc = 0.0;
    for (const Observation& p : data.points) {
        const double l = log_density(theta, p);
        if (std::isinf(l) && l < 0) return -kInf;
        acc += l;
    }
    return acc;
}

Dataset ModelFamily::sample(const Parameterization& theta, std::size_t n, RngStream& stream) const {
    require_in_domain(theta);
    if (n < 1) throw std::invalid_argument("sample: need n >= 1");
    Dataset d;
    d.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) d.points.push_back(sample_one(theta, stream));
    d.origin = DatasetOrigin{theta, stream.key()};
    return d;
}

Eigen::VectorXd ModelFamily::score_numeric(const Parameterization& theta, const Observation& x) const {
    const int k = static_cast<int>(theta.complexity());
    Eigen::VectorXd score(k);
    for (int i = 0; i < k; ++i) {
        const double h = fd_step(theta.values[i]);
        Parameterization hi = theta, lo = theta;
        hi.values[i] += h;
        lo.values[i] -= h;
        score(i) = (log_density(hi, x) - log_density(lo, x)) / (2.0 * h);
    }
    return score;
}

Eigen::MatrixXd ModelFamily::fisher_information_numeric(const Parameterization& theta,
                                                        std::size_t n_draws, RngStream stream) const {
    require_in_domain(theta);
    const int k = static_cast<int>(theta.complexity());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t i = 0; i < n_draws; ++i) {
        const Observation x = sample_one(theta, stream);
        const Eigen::VectorXd s = score_numeric(theta, x);
        mean += s;
        second += s * s.transpose();
    }
    const double n = static_cast<double>(n_draws);
    mean /= n;
    return second / n - mean * mean.transpose();
}

Eigen::MatrixXd ModelFamily::fisher_information(const Parameterization& theta) const {
    require_in_domain(theta);
    Eigen::MatrixXd info = fisher_information_numeric(theta, 100000, RngStream(kInternalFisherSeed));
    if (!info.allFinite())
        throw SingularityError("fisher_information: non-finite entries for family " + id());
    return info;
}

double ModelFamily::fisher_min_eigenvalue(const Parameterization& theta) const {
    const Eigen::MatrixXd info = fisher_information(theta);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(info);
    return solver.eigenvalues().minCoeff();
}

double ModelFamily::kl_divergence(const Parameterization& theta1, const Parameterization& theta2) const {
    require_in_domain(theta1);
    require_in_domain(theta2);
    switch (obs_space()) {
        case ObsSpace::Binary: {
            double d = 0.0;
            for (double xv : {0.0, 1.0}) {
                const Observation x = scalar_obs(xv);
                const double l1 = log_density(theta1, x);
                const double l2 = log_density(theta2, x);
                if (std::isinf(l1) && l1 < 0) continue;  // zero mass contributes nothing
                if (std::isinf(l2) && l2 < 0) return kInf;
                d += std::exp(l1) * (l1 - l2);
            }
            return std::max(d, 0.0);
        }
        case ObsSpace::RealScalar: {
            const Interval hull = observation_hull(theta1);
            const QuadRule& rule = gauss_legendre(512);
            const double c = 0.5 * (hull.hi + hull.lo), h = 0.5 * (hull.hi - hull.lo);
            double d = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const Observation x = scalar_obs(c + h * rule.nodes[i]);
                const double l1 = log_density(theta1, x);
                if (std::isinf(l1) && l1 < 0) continue;
                const double l2 = log_density(theta2, x);
                if (std::isinf(l2) && l2 < 0) return kInf;
                d += rule.weights[i] * h * std::exp(l1) * (l1 - l2);
            }
            return std::max(d, 0.0);
        }
        case ObsSpace::RealPair: {
            RngStream stream(kInternalKlSeed);
            const std::size_t n = 200000;
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const Observation x = sample_one(theta1, stream);
                const double l1 = log_density(theta1, x);
                const double l2 = log_density(theta2, x);
                if (std::isinf(l2) && l2 < 0) return kInf;
                d += l1 - l2;
            }
            return std::max(d / static_cast<double>(n), 0.0);
        }
    }
    return 0.0;
}

MleResult ModelFamily::mle(const Dataset& data, int k) const {
    if (data.empty()) throw std::invalid_argument("mle: empty dataset");
    const auto [k_min, k_max] = complexity_range();
    if (k < k_min || k > k_max) throw DomainError("mle: complexity outside family range");
    return multistart_mle(*this, data, k);
}

Parameterization ModelFamily::initial_guess(const Dataset& data, int k) const {
    (void)data;
    // Midpoint-ish fallback; families override with moment matching.
    const auto domain = parameter_domain(k);
    std::vector<double> v(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const Interval& iv = domain[static_cast<std::size_t>(i)];
        const double lo = std::isfinite(iv.lo) ? iv.lo : -1.0;
        const double hi = std::isfinite(iv.hi) ? iv.hi : 1.0;
        v[static_cast<std::size_t>(i)] = 0.5 * (lo + hi);
    }
    return make_param(std::move(v));
}

Parameterization ModelFamily::embed(const Parameterization&, int) const {
    throw std::logic_error("embed: family " + id() + " is not nested");
}

Eigen::MatrixXd ModelFamily::loglik_hessian(const Parameterization& theta, const Dataset& data) const {
    // Central-difference fallback; families with closed forms override.
    const int k = static_cast<int>(theta.complexity());
    Eigen::MatrixXd hess(k, k);
    const double f0 = log_likelihood(theta, data);
    for (int i = 0; i < k; ++i) {
        const double hi = fd_step(theta.values[i]);
        for (int j = i; j < k; ++j) {
            if (i == j) {
                Parameterization p = theta, m = theta;
                p.values[i] += hi;
                m.values[i] -= hi;
                hess(i, i) = (log_likelihood(p, data) - 2.0 * f0 + log_likelihood(m, data)) / (hi * hi);
            } else {
                const double hj = fd_step(theta.values[j]);
                Parameterization pp = theta, pm = theta, mp = theta, mm = theta;
                pp.values[i] += hi; pp.values[j] += hj;
                pm.values[i] += hi; pm.values[j] -= hj;
                mp.values[i] -= hi; mp.values[j] += hj;
                mm.values[i] -= hi; mm.values[j] -= hj;
                hess(i, j) = hess(j, i) =
                    (log_likelihood(pp, data) - log_likelihood(pm, data) -
                     log_likelihood(mp, data) + log_likelihood(mm, data)) /
                    (4.0 * hi * hj);
            }
        }
    }
    return hess;
}

Interval ModelFamily::observation_hull(const Parameterization&) const {
    throw std::logic_error("observation_hull: not provided by family " + id());
}

Parameterization ModelFamily::make_param(std::vector<double> values) const {
    return Parameterization{id(), std::move(values)};
}

}  // namespace wprior
