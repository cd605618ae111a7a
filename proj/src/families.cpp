#include "wprior/families.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "wprior/math.hpp"

namespace wprior {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kClampEps = 1e-12;
const Interval kRealLine{-kInf, kInf};

double data_mean(const Dataset& data) {
    double s = 0.0;
    for (const Observation& p : data.points) s += p.x;
    return s / static_cast<double>(data.n());
}
}  // namespace

// ---------------------------------------------------------------------------
// GaussMeanFamily

GaussMeanFamily::GaussMeanFamily(double variance) : variance_(variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("GaussMeanFamily: variance must be positive");
}

std::vector<Interval> GaussMeanFamily::parameter_domain(int) const { return {kRealLine}; }

double GaussMeanFamily::log_density(const Parameterization& theta, const Observation& x) const {
    return normal_log_pdf(x.x, theta.values[0], variance_);
}

Observation GaussMeanFamily::sample_one(const Parameterization& theta, RngStream& stream) const {
    return scalar_obs(stream.normal(theta.values[0], std::sqrt(variance_)));
}

Eigen::MatrixXd GaussMeanFamily::fisher_information(const Parameterization& theta) const {
    require_in_domain(theta);
    Eigen::MatrixXd info(1, 1);
    info(0, 0) = 1.0 / variance_;
    return info;
}

double GaussMeanFamily::kl_divergence(const Parameterization& a, const Parameterization& b) const {
    require_in_domain(a);
    require_in_domain(b);
    const double d = a.values[0] - b.values[0];
    return d * d / (2.0 * variance_);
}

MleResult GaussMeanFamily::mle(const Dataset& data, int) const {
    if (data.empty()) throw std::invalid_argument("mle: empty dataset");
    MleResult r;
    r.value = make_param({data_mean(data)});
    r.log_likelihood = log_likelihood(r.value, data);
    return r;
}

Parameterization GaussMeanFamily::initial_guess(const Dataset& data, int) const {
    return make_param({data_mean(data)});
}

Eigen::MatrixXd GaussMeanFamily::loglik_hessian(const Parameterization&, const Dataset& data) const {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = -static_cast<double>(data.n()) / variance_;
    return h;
}

Interval GaussMeanFamily::observation_hull(const Parameterization& theta) const {
    const double sd = std::sqrt(variance_);
    return {theta.values[0] - 14.0 * sd, theta.values[0] + 14.0 * sd};
}

// ---------------------------------------------------------------------------
// GaussMeanVarFamily

std::vector<Interval> GaussMeanVarFamily::parameter_domain(int) const {
    return {kRealLine, Interval{0.0, kInf}};
}

double GaussMeanVarFamily::log_density(const Parameterization& theta, const Observation& x) const {
    return normal_log_pdf(x.x, theta.values[0], theta.values[1]);
}

Observation GaussMeanVarFamily::sample_one(const Parameterization& theta, RngStream& stream) const {
    return scalar_obs(stream.normal(theta.values[0], std::sqrt(theta.values[1])));
}

Eigen::MatrixXd GaussMeanVarFamily::fisher_information(const Parameterization& theta) const {
    require_in_domain(theta);
    const double v = theta.values[1];
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(2, 2);
    info(0, 0) = 1.0 / v;
    info(1, 1) = 1.0 / (2.0 * v * v);
    return info;
}

double GaussMeanVarFamily::kl_divergence(const Parameterization& a, const Parameterization& b) const {
    require_in_domain(a);
    require_in_domain(b);
    const double dm = a.values[0] - b.values[0];
    const double v1 = a.values[1], v2 = b.values[1];
    return 0.5 * (std::log(v2 / v1) + (v1 + dm * dm) / v2 - 1.0);
}

MleResult GaussMeanVarFamily::mle(const Dataset& data, int) const {
    if (data.empty()) throw std::invalid_argument("mle: empty dataset");
    const double mean = data_mean(data);
    double ss = 0.0;
    for (const Observation& p : data.points) ss += (p.x - mean) * (p.x - mean);
    double v = ss / static_cast<double>(data.n());
    MleResult r;
    if (v < kClampEps) {
        v = kClampEps;
        r.clamped = true;
    }
    r.value = make_param({mean, v});
    r.log_likelihood = log_likelihood(r.value, data);
    return r;
}

Parameterization GaussMeanVarFamily::initial_guess(const Dataset& data, int) const {
    return mle(data, 2).value;
}

Eigen::MatrixXd GaussMeanVarFamily::loglik_hessian(const Parameterization& theta, const Dataset& data) const {
    const double mu = theta.values[0], v = theta.values[1];
    const double n = static_cast<double>(data.n());
    double s1 = 0.0, s2 = 0.0;
    for (const Observation& p : data.points) {
        s1 += p.x - mu;
        s2 += (p.x - mu) * (p.x - mu);
    }
    Eigen::MatrixXd h(2, 2);
    h(0, 0) = -n / v;
    h(0, 1) = h(1, 0) = -s1 / (v * v);
    h(1, 1) = 0.5 * n / (v * v) - s2 / (v * v * v);
    return h;
}

Interval GaussMeanVarFamily::observation_hull(const Parameterization& theta) const {
    const double sd = std::sqrt(theta.values[1]);
    return {theta.values[0] - 14.0 * sd, theta.values[0] + 14.0 * sd};
}

// ---------------------------------------------------------------------------
// BernoulliFamily

std::vector<Interval> BernoulliFamily::parameter_domain(int) const { return {Interval{0.0, 1.0}}; }

double BernoulliFamily::log_density(const Parameterization& theta, const Observation& x) const {
    const double p = theta.values[0];
    if (x.x != 0.0 && x.x != 1.0) return -kInf;
    return x.x > 0.5 ? std::log(p) : std::log1p(-p);
}

Observation BernoulliFamily::sample_one(const Parameterization& theta, RngStream& stream) const {
    return scalar_obs(stream.bernoulli(theta.values[0]) ? 1.0 : 0.0);
}

Eigen::MatrixXd BernoulliFamily::fisher_information(const Parameterization& theta) const {
    require_in_domain(theta);
    const double p = theta.values[0];
    Eigen::MatrixXd info(1, 1);
    info(0, 0) = 1.0 / (p * (1.0 - p));
    return info;
}

double BernoulliFamily::kl_divergence(const Parameterization& a, const Parameterization& b) const {
    require_in_domain(a);
    require_in_domain(b);
    const double p = a.values[0], q = b.values[0];
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

MleResult BernoulliFamily::mle(const Dataset& data, int) const {
    if (data.empty()) throw std::invalid_argument("mle: empty dataset");
    double p = data_mean(data);
    MleResult r;
    if (p < kClampEps) {
        p = kClampEps;
        r.clamped = true;
    } else if (p > 1.0 - kClampEps) {
        p = 1.0 - kClampEps;
        r.clamped = true;
    }
    r.value = make_param({p});
    r.log_likelihood = log_likelihood(r.value, data);
    return r;
}

Parameterization BernoulliFamily::initial_guess(const Dataset& data, int) const {
    return mle(data, 1).value;
}

Eigen::MatrixXd BernoulliFamily::loglik_hessian(const Parameterization& theta, const Dataset& data) const {
    const double p = theta.values[0];
    double heads = 0.0;
    for (const Observation& o : data.points) heads += o.x;
    const double tails = static_cast<double>(data.n()) - heads;
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = -(heads / (p * p) + tails / ((1.0 - p) * (1.0 - p)));
    return h;
}

// ---------------------------------------------------------------------------
// ExponentialFamily

std::vector<Interval> ExponentialFamily::parameter_domain(int) const { return {Interval{0.0, kInf}}; }

double ExponentialFamily::log_density(const Parameterization& theta, const Observation& x) const {
    const double rate = theta.values[0];
    if (x.x <= 0.0) return -kInf;
    return std::log(rate) - rate * x.x;
}

Observation ExponentialFamily::sample_one(const Parameterization& theta, RngStream& stream) const {
    return scalar_obs(stream.exponential(theta.values[0]));
}

Eigen::MatrixXd ExponentialFamily::fisher_information(const Parameterization& theta) const {
    require_in_domain(theta);
    const double rate = theta.values[0];
    Eigen::MatrixXd info(1, 1);
    info(0, 0) = 1.0 / (rate * rate);
    return info;
}

double ExponentialFamily::kl_divergence(const Parameterization& a, const Parameterization& b) const {
    require_in_domain(a);
    require_in_domain(b);
    const double l1 = a.values[0], l2 = b.values[0];
    return std::log(l1 / l2) + l2 / l1 - 1.0;
}

MleResult ExponentialFamily::mle(const Dataset& data, int) const {
    if (data.empty()) throw std::invalid_argument("mle: empty dataset");
    const double mean = data_mean(data);
    if (!(mean > 0.0)) throw DomainError("exponential mle: nonpositive sample mean");
    MleResult r;
    r.value = make_param({1.0 / mean});
    r.log_likelihood = log_likelihood(r.value, data);
    return r;
}

Parameterization ExponentialFamily::initial_guess(const Dataset& data, int) const {
    return mle(data, 1).value;
}

Eigen::MatrixXd ExponentialFamily::loglik_hessian(const Parameterization& theta, const Dataset& data) const {
    const double rate = theta.values[0];
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = -static_cast<double>(data.n()) / (rate * rate);
    return h;
}

Interval ExponentialFamily::observation_hull(const Parameterization& theta) const {
    return {1e-12, 45.0 / theta.values[0]};
}

// ---------------------------------------------------------------------------
// PolynomialFamily

PolynomialFamily::PolynomialFamily(int k_max, double noise_variance)
    : k_max_(k_max), noise_variance_(noise_variance) {
    if (k_max < 1) throw std::invalid_argument("PolynomialFamily: k_max must be >= 1");
    if (!(noise_variance > 0.0))
        throw std::invalid_argument("PolynomialFamily: noise variance must be positive");
}

std::vector<Interval> PolynomialFamily::parameter_domain(int k) const {
    return std::vector<Interval>(static_cast<std::size_t>(k), kRealLine);
}

double PolynomialFamily::predict(const Parameterization& theta, double x) const {
    double acc = 0.0;
    for (std::size_t j = theta.values.size(); j-- > 0;) acc = acc * x + theta.values[j];
    return acc;
}

double PolynomialFamily::log_density(const Parameterization& theta, const Observation& p) const {
    if (p.x <= -1.0 || p.x >= 1.0) return -kInf;
    return std::log(0.5) + normal_log_pdf(p.y, predict(theta, p.x), noise_variance_);
}

double PolynomialFamily::null_model_log_density(const Observation& p) const {
    if (p.x <= -1.0 || p.x >= 1.0) return -kInf;
    return std::log(0.5) + normal_log_pdf(p.y, 0.0, noise_variance_);
}

Observation PolynomialFamily::sample_one(const Parameterization& theta, RngStream& stream) const {
    Observation p;
    p.x = stream.uniform(-1.0, 1.0);
    p.y = stream.normal(predict(theta, p.x), std::sqrt(noise_variance_));
    return p;
}

Eigen::MatrixXd PolynomialFamily::covariate_moments(int k) const {
    Eigen::MatrixXd m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const int order = i + j;
            m(i, j) = (order % 2 == 0) ? 1.0 / static_cast<double>(order + 1) : 0.0;
        }
    return m;
}

Eigen::MatrixXd PolynomialFamily::fisher_information(const Parameterization& theta) const {
    require_in_domain(theta);
    return covariate_moments(static_cast<int>(theta.complexity())) / noise_variance_;
}

double PolynomialFamily::kl_divergence(const Parameterization& a, const Parameterization& b) const {
    require_in_domain(a);
    require_in_domain(b);
    const int k = static_cast<int>(std::max(a.complexity(), b.complexity()));
    Eigen::VectorXd diff = Eigen::VectorXd::Zero(k);
    for (std::size_t j = 0; j < a.values.size(); ++j) diff(static_cast<int>(j)) += a.values[j];
    for (std::size_t j = 0; j < b.values.size(); ++j) diff(static_cast<int>(j)) -= b.values[j];
    return diff.dot(covariate_moments(k) * diff) / (2.0 * noise_variance_);
}

MleResult PolynomialFamily::mle(const Dataset& data, int k) const {
    if (data.empty()) throw std::invalid_argument("mle: empty dataset");
    if (k < 1 || k > k_max_) throw DomainError("poly mle: complexity outside range");
    const auto n = static_cast<Eigen::Index>(data.n());
    Eigen::MatrixXd design(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Observation& p = data.points[static_cast<std::size_t>(i)];
        double pw = 1.0;
        for (int j = 0; j < k; ++j) {
            design(i, j) = pw;
            pw *= p.x;
        }
        y(i) = p.y;
    }
    // Minimum-norm least squares; also the equal-likelihood tie-break.
    const Eigen::VectorXd beta = design.completeOrthogonalDecomposition().solve(y);
    MleResult r;
    r.value = make_param(std::vector<double>(beta.data(), beta.data() + k));
    r.log_likelihood = log_likelihood(r.value, data);
    return r;
}

Parameterization PolynomialFamily::initial_guess(const Dataset& data, int k) const {
    return mle(data, k).value;
}

Parameterization PolynomialFamily::embed(const Parameterization& theta, int k) const {
    if (k < static_cast<int>(theta.complexity()) || k > k_max_)
        throw DomainError("poly embed: target complexity out of range");
    std::vector<double> values = theta.values;
    values.resize(static_cast<std::size_t>(k), 0.0);
    return make_param(std::move(values));
}

Eigen::MatrixXd PolynomialFamily::loglik_hessian(const Parameterization& theta, const Dataset& data) const {
    const int k = static_cast<int>(theta.complexity());
    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd row(k);
    for (const Observation& p : data.points) {
        double pw = 1.0;
        for (int j = 0; j < k; ++j) {
            row(j) = pw;
            pw *= p.x;
        }
        xtx += row * row.transpose();
    }
    return -xtx / noise_variance_;
}

// ---------------------------------------------------------------------------
// Registry

const ModelFamily& family_registry(const std::string& id) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<ModelFamily>> families;
    std::lock_guard<std::mutex> lock(mu);
    if (families.empty()) {
        families["gauss_mean"] = std::make_unique<GaussMeanFamily>();
        families["gauss_mv"] = std::make_unique<GaussMeanVarFamily>();
        families["bernoulli"] = std::make_unique<BernoulliFamily>();
        families["exponential"] = std::make_unique<ExponentialFamily>();
        families["poly"] = std::make_unique<PolynomialFamily>();
    }
    const auto it = families.find(id);
    if (it == families.end()) throw std::invalid_argument("unknown family id: " + id);
    return *it->second;
}

std::vector<std::string> registered_family_ids() {
    return {"gauss_mean", "gauss_mv", "bernoulli", "exponential", "poly"};
}

}  // namespace wprior
