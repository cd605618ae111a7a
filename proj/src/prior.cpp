#include "wprior/prior.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <sstream>

#include "wprior/families.hpp"
#include "wprior/math.hpp"

namespace wprior {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double half_log_det_fisher(const ModelFamily& family, const Parameterization& theta) {
    const Eigen::MatrixXd info = family.fisher_information(theta);
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success)
        throw SingularityError("jeffreys density: Fisher information not positive definite");
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < info.rows(); ++i) log_det += std::log(llt.matrixL()(i, i));
    if (!std::isfinite(log_det))
        throw SingularityError("jeffreys density: non-finite Fisher determinant");
    return log_det;  // = 0.5 * log det I
}
}  // namespace

bool TruncationDomain::contains(const Parameterization& theta) const {
    if (theta.values.size() != box.size()) return false;
    for (std::size_t i = 0; i < box.size(); ++i)
        if (theta.values[i] < box[i].lo || theta.values[i] > box[i].hi) return false;
    return true;
}

double TruncationDomain::log_volume() const {
    double v = 0.0;
    for (const Interval& iv : box) v += std::log(iv.hi - iv.lo);
    return v;
}

TruncationDomain TruncationDomain::scaled_about_center(double factor) const {
    TruncationDomain d = *this;
    for (Interval& iv : d.box) {
        const double c = 0.5 * (iv.lo + iv.hi);
        const double h = 0.5 * (iv.hi - iv.lo) * factor;
        iv = {c - h, c + h};
    }
    return d;
}

double Prior::shape_log_density(const Parameterization& theta) const {
    switch (kind) {
        case PriorKind::Flat:
            return 0.0;
        case PriorKind::Jeffreys:
            return half_log_det_fisher(*family, theta);
        case PriorKind::WPrior: {
            const double k = static_cast<double>(complexity);
            return half_log_det_fisher(*family, theta) +
                   0.5 * k * std::log(*built_for_n / (2.0 * kPi)) - k;
        }
        case PriorKind::Gaussian: {
            double acc = 0.0;
            for (std::size_t i = 0; i < theta.values.size(); ++i)
                acc += normal_log_pdf(theta.values[i], params[2 * i], params[2 * i + 1]);
            return acc;
        }
        case PriorKind::Perturbed: {
            double t = 0.0;
            for (double v : theta.values) t += v;
            const double bump = 1.0 + params[0] * std::sin(params[1] * t + params[2]);
            return base->log_density(theta) + std::log(bump);
        }
        case PriorKind::Custom:
            return custom_log_density(theta);
    }
    return -kInf;
}

double Prior::log_density(const Parameterization& theta) const {
    if (domain && !domain->contains(theta)) return -kInf;
    return shape_log_density(theta) + scale_log - log_normalizer;
}

Prior Prior::scaled(double log_c) const {
    Prior p = *this;
    p.scale_log += log_c;
    if (p.is_proper && log_c != 0.0) p.is_proper = false;
    return p;
}

std::string Prior::describe() const {
    std::string name;
    switch (kind) {
        case PriorKind::Flat: name = "flat"; break;
        case PriorKind::Jeffreys: name = "jeffreys"; break;
        case PriorKind::WPrior: name = "wprior"; break;
        case PriorKind::Gaussian: {
            std::ostringstream os;
            os << "gauss:" << params[0] << ',' << params[1];
            name = os.str();
            break;
        }
        case PriorKind::Perturbed: name = "perturbed(" + base->describe() + ")"; break;
        case PriorKind::Custom: name = "custom"; break;
    }
    if (scale_log != 0.0) {
        std::ostringstream os;
        os << name << '*' << std::exp(scale_log);
        name = os.str();
    }
    if (is_proper) name += "|normalized";
    return name;
}

Prior flat_prior(const ModelFamily& family, int k, double scale_log) {
    Prior p;
    p.family = &family;
    p.complexity = k;
    p.kind = PriorKind::Flat;
    p.scale_log = scale_log;
    return p;
}

Prior jeffreys_prior(const ModelFamily& family, int k) {
    Prior p;
    p.family = &family;
    p.complexity = k;
    p.kind = PriorKind::Jeffreys;
    return p;
}

Prior w_prior_regular(const ModelFamily& family, int k, double n_obs) {
    if (!(n_obs >= 1.0)) throw std::invalid_argument("w_prior_regular: need n >= 1");
    Prior p;
    p.family = &family;
    p.complexity = k;
    p.kind = PriorKind::WPrior;
    p.built_for_n = n_obs;
    return p;
}

Prior gaussian_prior(const ModelFamily& family, int k,
                     const std::vector<std::pair<double, double>>& moments) {
    if (static_cast<int>(moments.size()) != k)
        throw std::invalid_argument("gaussian_prior: need one (mean, variance) pair per coordinate");
    Prior p;
    p.family = &family;
    p.complexity = k;
    p.kind = PriorKind::Gaussian;
    p.is_proper = true;  // integrates to 1 over the whole block
    for (const auto& [m, v] : moments) {
        if (!(v > 0.0)) throw std::invalid_argument("gaussian_prior: variance must be positive");
        p.params.push_back(m);
        p.params.push_back(v);
    }
    return p;
}

Prior perturbed_prior(const Prior& base, double eps, double omega, double phase) {
    if (std::abs(eps) >= 1.0) throw std::invalid_argument("perturbed_prior: |eps| must be < 1");
    if (eps == 0.0) return base;  // the identity perturbation is the base itself
    Prior p;
    p.family = base.family;
    p.complexity = base.complexity;
    p.kind = PriorKind::Perturbed;
    p.params = {eps, omega, phase};
    p.base = std::make_shared<Prior>(base);
    p.domain = base.domain;
    return p;
}

Prior perturbed_prior(const Prior& base, double eps, RngStream& stream) {
    const double omega = stream.uniform(0.5, 2.0);
    const double phase = stream.uniform(0.0, 2.0 * kPi);
    return perturbed_prior(base, eps, omega, phase);
}

namespace {

/// log integral of the prior density over the box (quadrature, K <= 2).
/// Uses the full density so that normalizing twice is a no-op and an
/// existing (smaller) truncation domain is respected.
double log_mass_quadrature(const Prior& prior, const TruncationDomain& domain) {
    const int k = prior.complexity;
    const QuadRule& rule = gauss_legendre(256);
    const auto eval_shape = [&](const std::vector<double>& values) {
        return prior.log_density(Parameterization{prior.family->id(), values});
    };
    std::vector<double> terms;
    if (k == 1) {
        const Interval& iv = domain.box[0];
        const double c = 0.5 * (iv.hi + iv.lo), h = 0.5 * (iv.hi - iv.lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            terms.push_back(eval_shape({c + h * rule.nodes[i]}) + std::log(rule.weights[i] * h));
    } else {
        const Interval& a = domain.box[0];
        const Interval& b = domain.box[1];
        const double ca = 0.5 * (a.hi + a.lo), ha = 0.5 * (a.hi - a.lo);
        const double cb = 0.5 * (b.hi + b.lo), hb = 0.5 * (b.hi - b.lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            for (std::size_t j = 0; j < rule.nodes.size(); ++j)
                terms.push_back(eval_shape({ca + ha * rule.nodes[i], cb + hb * rule.nodes[j]}) +
                                std::log(rule.weights[i] * ha) + std::log(rule.weights[j] * hb));
    }
    return log_sum_exp(terms);
}

double log_mass_monte_carlo(const Prior& prior, const TruncationDomain& domain) {
    RngStream stream(0x11A55EEDull);
    const std::size_t n = 200000;
    std::vector<double> terms;
    terms.reserve(n);
    std::vector<double> values(domain.box.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < domain.box.size(); ++d)
            values[d] = stream.uniform(domain.box[d].lo, domain.box[d].hi);
        terms.push_back(prior.log_density(Parameterization{prior.family->id(), values}));
    }
    return log_sum_exp(terms) - std::log(static_cast<double>(n)) + domain.log_volume();
}

}  // namespace

std::pair<Prior, double> normalize(const Prior& prior, const TruncationDomain& domain) {
    if (static_cast<int>(domain.box.size()) != prior.complexity)
        throw std::invalid_argument("normalize: domain dimension mismatch");
    const double log_mass = prior.complexity <= 2 ? log_mass_quadrature(prior, domain)
                                                  : log_mass_monte_carlo(prior, domain);
    if (!std::isfinite(log_mass))
        throw NormalizationError("normalize: prior mass over the domain is not finite");
    Prior proper = prior;
    proper.domain = domain;
    proper.log_normalizer = prior.log_normalizer + log_mass;
    proper.is_proper = true;
    return {proper, log_mass};
}

TruncationDomain default_truncation(const ModelFamily& family, int k) {
    const std::string id = family.id();
    TruncationDomain d;
    if (id == "gauss_mean") {
        d.box = {{-10.0, 10.0}};
    } else if (id == "gauss_mv") {
        d.box = {{-10.0, 10.0}, {1e-2, 1e2}};
    } else if (id == "bernoulli") {
        d.box = {{1e-3, 1.0 - 1e-3}};
    } else if (id == "exponential") {
        d.box = {{1e-2, 1e2}};
    } else if (id == "poly") {
        d.box.assign(static_cast<std::size_t>(k), Interval{-10.0, 10.0});
    } else {
        throw std::invalid_argument("default_truncation: no default for family " + id);
    }
    return d;
}

std::vector<Prior> w_prior_over_complexities(const ModelFamily& family, double n_obs) {
    const auto [k_min, k_max] = family.complexity_range();
    std::vector<Prior> priors;
    for (int k = k_min; k <= k_max; ++k) priors.push_back(w_prior_regular(family, k, n_obs));
    return priors;
}

Prior parse_prior_spec(const ModelFamily& family, int k, double n_obs, const std::string& spec) {
    std::string name = spec;
    double log_scale = 0.0;
    if (const auto star = spec.find('*'); star != std::string::npos) {
        name = spec.substr(0, star);
        const double c = std::stod(spec.substr(star + 1));
        if (!(c > 0.0)) throw std::invalid_argument("prior scale must be positive: " + spec);
        log_scale = std::log(c);
    }
    if (name == "flat") return flat_prior(family, k, log_scale);
    if (name == "jeffreys") return jeffreys_prior(family, k).scaled(log_scale);
    if (name == "wprior") return w_prior_regular(family, k, n_obs).scaled(log_scale);
    if (name.rfind("gauss:", 0) == 0) {
        std::vector<std::pair<double, double>> moments;
        std::istringstream in(name.substr(6));
        std::string tok;
        std::vector<double> vals;
        while (std::getline(in, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() != static_cast<std::size_t>(2 * k))
            throw std::invalid_argument("gauss prior needs mean,var per coordinate: " + spec);
        for (int i = 0; i < k; ++i) moments.emplace_back(vals[2 * i], vals[2 * i + 1]);
        return gaussian_prior(family, k, moments).scaled(log_scale);
    }
    throw std::invalid_argument("unknown prior spec: " + spec);
}

Parameterization sample_prior(const Prior& prior, RngStream& stream) {
    if (!prior.is_proper) throw std::invalid_argument("sample_prior: prior must be proper");
    const std::string family_id = prior.family->id();
    if (prior.kind == PriorKind::Gaussian) {
        for (int tries = 0; tries < 100000; ++tries) {
            std::vector<double> v(static_cast<std::size_t>(prior.complexity));
            for (int i = 0; i < prior.complexity; ++i)
                v[static_cast<std::size_t>(i)] =
                    stream.normal(prior.params[2 * static_cast<std::size_t>(i)],
                                  std::sqrt(prior.params[2 * static_cast<std::size_t>(i) + 1]));
            Parameterization theta{family_id, v};
            if (!prior.domain || prior.domain->contains(theta)) return theta;
        }
        throw std::runtime_error("sample_prior: rejection against the domain failed");
    }
    if (!prior.domain || prior.complexity > 2)
        throw std::invalid_argument("sample_prior: need a truncation domain and K <= 2");
    // Grid envelope over the box, then rejection.
    const TruncationDomain& dom = *prior.domain;
    double max_log = -kInf;
    const int grid = dom.box.size() == 1 ? 512 : 64;
    std::vector<double> values(dom.box.size());
    const auto scan = [&](auto&& self, std::size_t dim) -> void {
        if (dim == dom.box.size()) {
            max_log = std::max(max_log, prior.log_density(Parameterization{family_id, values}));
            return;
        }
        for (int i = 0; i <= grid; ++i) {
            values[dim] = dom.box[dim].lo +
                          (dom.box[dim].hi - dom.box[dim].lo) * static_cast<double>(i) / grid;
            self(self, dim + 1);
        }
    };
    scan(scan, 0);
    const double bound = max_log + std::log(1.5);
    for (int tries = 0; tries < 1000000; ++tries) {
        for (std::size_t d = 0; d < dom.box.size(); ++d)
            values[d] = stream.uniform(dom.box[d].lo, dom.box[d].hi);
        Parameterization theta{family_id, values};
        if (std::log(stream.uniform()) < prior.log_density(theta) - bound) return theta;
    }
    throw std::runtime_error("sample_prior: rejection sampling failed");
}

}  // namespace wprior
