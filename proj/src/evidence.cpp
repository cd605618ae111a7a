#include "wprior/evidence.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "wprior/families.hpp"
#include "wprior/math.hpp"
#include "wprior/optimize.hpp"

namespace wprior {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kInternalIsSeed = 0x15DEFA0175EEDull;

enum class FamilyCase { GaussMean, GaussMeanVar, Bernoulli, Exponential, Poly, Generic };

FamilyCase classify(const ModelFamily& family) {
    const std::string id = family.id();
    if (id == "gauss_mean") return FamilyCase::GaussMean;
    if (id == "gauss_mv") return FamilyCase::GaussMeanVar;
    if (id == "bernoulli") return FamilyCase::Bernoulli;
    if (id == "exponential") return FamilyCase::Exponential;
    if (id == "poly") return FamilyCase::Poly;
    return FamilyCase::Generic;
}

struct SuffStats {
    FamilyCase fam = FamilyCase::Generic;
    double n = 0.0;
    double mean = 0.0;
    double css = 0.0;    // centered sum of squares
    double heads = 0.0;
    double tails = 0.0;
    double sum = 0.0;
    Eigen::MatrixXd xtx;
    Eigen::VectorXd xty;
    double yty = 0.0;
    bool support_ok = true;

    void add(const Observation& p);
};

void SuffStats::add(const Observation& p) {
    n += 1.0;
    switch (fam) {
        case FamilyCase::GaussMean:
        case FamilyCase::GaussMeanVar: {
            const double prev = mean;
            mean += (p.x - mean) / n;
            css += (p.x - prev) * (p.x - mean);
            break;
        }
        case FamilyCase::Bernoulli:
            if (p.x == 1.0)
                heads += 1.0;
            else if (p.x == 0.0)
                tails += 1.0;
            else
                support_ok = false;
            break;
        case FamilyCase::Exponential:
            if (p.x > 0.0)
                sum += p.x;
            else
                support_ok = false;
            break;
        case FamilyCase::Poly: {
            if (p.x <= -1.0 || p.x >= 1.0) support_ok = false;
            const int k = static_cast<int>(xtx.rows());
            Eigen::VectorXd row(k);
            double pw = 1.0;
            for (int j = 0; j < k; ++j) {
                row(j) = pw;
                pw *= p.x;
            }
            xtx += row * row.transpose();
            xty += row * p.y;
            yty += p.y * p.y;
            break;
        }
        case FamilyCase::Generic:
            break;
    }
}

SuffStats build_suff(const ModelFamily& family, const Dataset& data, int k) {
    SuffStats s;
    s.fam = classify(family);
    if (s.fam == FamilyCase::Poly) {
        s.xtx = Eigen::MatrixXd::Zero(k, k);
        s.xty = Eigen::VectorXd::Zero(k);
    }
    for (const Observation& p : data.points) s.add(p);
    return s;
}

Parameterization reference_point(const ModelFamily& family, int k) {
    switch (classify(family)) {
        case FamilyCase::GaussMean: return {family.id(), {0.0}};
        case FamilyCase::GaussMeanVar: return {family.id(), {0.0, 1.0}};
        case FamilyCase::Bernoulli: return {family.id(), {0.5}};
        case FamilyCase::Exponential: return {family.id(), {1.0}};
        case FamilyCase::Poly: return {family.id(), std::vector<double>(static_cast<std::size_t>(k), 0.0)};
        case FamilyCase::Generic: break;
    }
    throw std::logic_error("reference_point: generic family");
}

bool conjugate_available(const ModelFamily& family, const Prior& prior) {
    if (prior.domain) return false;  // truncated priors go through quadrature
    const FamilyCase fam = classify(family);
    if (fam == FamilyCase::Generic) return false;
    switch (prior.kind) {
        case PriorKind::Flat:
        case PriorKind::Jeffreys:
        case PriorKind::WPrior:
            return true;  // constant or standard-kernel shapes for all shipped families
        case PriorKind::Gaussian:
            return fam == FamilyCase::GaussMean;
        default:
            return false;
    }
}

/// Exponent of the prior kernel absorbed by the conjugate formulas:
/// bernoulli p^(a-1)(1-p)^(b-1), exponential lambda^(a-1), gauss_mv v^g.
struct KernelShape {
    double a = 1.0;
    double b = 1.0;
    double g = 0.0;
};

KernelShape kernel_shape(FamilyCase fam, const Prior& prior) {
    KernelShape k;
    const bool jeffreys_like = prior.kind == PriorKind::Jeffreys || prior.kind == PriorKind::WPrior;
    if (fam == FamilyCase::Bernoulli && jeffreys_like) k.a = k.b = 0.5;
    if (fam == FamilyCase::Exponential && jeffreys_like) k.a = 0.0;
    if (fam == FamilyCase::GaussMeanVar && jeffreys_like) k.g = -1.5;
    return k;
}

/// Constant log-offset of the prior over its kernel, evaluated at a
/// reference point.
double kernel_offset(const ModelFamily& family, const Prior& prior, const KernelShape& ks) {
    const Parameterization ref = reference_point(family, prior.complexity);
    double kernel_log = 0.0;
    switch (classify(family)) {
        case FamilyCase::Bernoulli:
            kernel_log = (ks.a - 1.0) * std::log(ref.values[0]) + (ks.b - 1.0) * std::log1p(-ref.values[0]);
            break;
        case FamilyCase::Exponential:
            kernel_log = (ks.a - 1.0) * std::log(ref.values[0]);
            break;
        case FamilyCase::GaussMeanVar:
            kernel_log = ks.g * std::log(ref.values[1]);
            break;
        default:
            break;
    }
    return prior.log_density(ref) - kernel_log;
}

double conjugate_log_z(const ModelFamily& family, const Prior& prior, const SuffStats& s,
                       double temper) {
    const FamilyCase fam = s.fam;
    const KernelShape ks = kernel_shape(fam, prior);
    const double tn = temper * s.n;
    switch (fam) {
        case FamilyCase::GaussMean: {
            const double v = static_cast<const GaussMeanFamily&>(family).variance();
            if (prior.kind == PriorKind::Gaussian) {
                const double m0 = prior.params[0], v0 = prior.params[1];
                const double a = v / tn;  // variance of xbar as an estimate of mu
                return prior.scale_log - 0.5 * tn * std::log(2.0 * kPi * v) -
                       temper * s.css / (2.0 * v) + 0.5 * std::log(2.0 * kPi * a) +
                       normal_log_pdf(s.mean, m0, a + v0);
            }
            const double c = kernel_offset(family, prior, ks);
            return c - 0.5 * tn * std::log(2.0 * kPi * v) + 0.5 * std::log(2.0 * kPi * v / tn) -
                   temper * s.css / (2.0 * v);
        }
        case FamilyCase::Bernoulli: {
            const double c = kernel_offset(family, prior, ks);
            return c + log_beta(temper * s.heads + ks.a, temper * s.tails + ks.b);
        }
        case FamilyCase::Exponential: {
            const double c = kernel_offset(family, prior, ks);
            const double shape = tn + ks.a;
            if (!(shape > 0.0)) throw SingularityError("conjugate evidence: nonpositive gamma shape");
            return c + std::lgamma(shape) - shape * std::log(temper * s.sum);
        }
        case FamilyCase::GaussMeanVar: {
            const double c = kernel_offset(family, prior, ks);
            const double shape = 0.5 * tn - ks.g - 1.5;
            if (!(shape > 0.0))
                throw SingularityError("conjugate evidence: too few observations for this prior");
            if (!(s.css > 0.0))
                throw SingularityError("conjugate evidence: degenerate data (zero variance)");
            return c - 0.5 * tn * std::log(2.0 * kPi) + 0.5 * std::log(2.0 * kPi / tn) +
                   std::lgamma(shape) - shape * std::log(0.5 * temper * s.css);
        }
        case FamilyCase::Poly: {
            const auto& poly = static_cast<const PolynomialFamily&>(family);
            const double sigma2 = poly.noise_variance();
            const double c = kernel_offset(family, prior, ks);
            Eigen::LLT<Eigen::MatrixXd> llt(s.xtx);
            if (llt.info() != Eigen::Success)
                throw SingularityError("conjugate evidence: rank-deficient design");
            const Eigen::VectorXd beta = llt.solve(s.xty);
            const double rss = s.yty - s.xty.dot(beta);
            const int k = static_cast<int>(s.xtx.rows());
            double log_det = 0.0;  // log det(temper * xtx / sigma2)
            for (int i = 0; i < k; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
            log_det += k * std::log(temper / sigma2);
            return c +
                   temper * (s.n * std::log(0.5) - 0.5 * s.n * std::log(2.0 * kPi * sigma2) -
                             rss / (2.0 * sigma2)) +
                   0.5 * k * std::log(2.0 * kPi) - 0.5 * log_det;
        }
        case FamilyCase::Generic:
            break;
    }
    throw std::logic_error("conjugate_log_z: unsupported family");
}

}  // namespace

std::string to_string(EvidenceMethod method) {
    switch (method) {
        case EvidenceMethod::Auto: return "auto";
        case EvidenceMethod::Conjugate: return "conjugate";
        case EvidenceMethod::Quadrature: return "quadrature";
        case EvidenceMethod::ImportanceSampling: return "importance_sampling";
        case EvidenceMethod::Laplace: return "laplace";
    }
    return "?";
}

nlohmann::json LogEvidence::to_json() const {
    nlohmann::json j{{"value", value},
                     {"std_error", std_error},
                     {"method", to_string(method)},
                     {"n_obs", n_obs},
                     {"temper", temper}};
    if (method == EvidenceMethod::ImportanceSampling) j["ess"] = ess;
    if (zero_likelihood) j["zero_likelihood"] = true;
    if (low_ess_warning) j["low_ess_warning"] = true;
    if (n_mismatch_warning) j["n_mismatch_warning"] = true;
    if (!bias_note.empty()) j["bias_note"] = bias_note;
    return j;
}

// ---------------------------------------------------------------------------

struct PosteriorCache::Impl {
    const ModelFamily* fam = nullptr;
    Prior prior;
    Dataset data;
    EvidenceSpec spec;
    double temper = 1.0;
    SuffStats suff;
    LogEvidence ev;

    // quadrature state
    std::vector<Parameterization> nodes;
    std::vector<double> node_log_weight;     // integration weight (log)
    std::vector<double> node_log_posterior;  // normalized posterior mass at node (log)

    // importance-sampling state
    std::vector<Parameterization> draws;
    std::vector<double> draw_log_posterior;  // normalized weight (log)

    double tempered_loglik(const Parameterization& theta) const;
    void build(RngStream* stream);
    void run_quadrature();
    void run_importance(RngStream* stream);
    double conjugate_predictive(const Observation& x) const;
};

double PosteriorCache::Impl::tempered_loglik(const Parameterization& theta) const {
    if (!fam->in_domain(theta)) return -kInf;
    switch (suff.fam) {
        case FamilyCase::GaussMean: {
            const double v = static_cast<const GaussMeanFamily*>(fam)->variance();
            const double mu = theta.values[0];
            const double d = suff.mean - mu;
            return temper * (-0.5 * suff.n * std::log(2.0 * kPi * v) -
                             (suff.css + suff.n * d * d) / (2.0 * v));
        }
        case FamilyCase::GaussMeanVar: {
            const double mu = theta.values[0], v = theta.values[1];
            const double d = suff.mean - mu;
            return temper * (-0.5 * suff.n * std::log(2.0 * kPi * v) -
                             (suff.css + suff.n * d * d) / (2.0 * v));
        }
        case FamilyCase::Bernoulli: {
            const double p = theta.values[0];
            return temper * (suff.heads * std::log(p) + suff.tails * std::log1p(-p));
        }
        case FamilyCase::Exponential: {
            const double rate = theta.values[0];
            return temper * (suff.n * std::log(rate) - rate * suff.sum);
        }
        case FamilyCase::Poly: {
            const auto* poly = static_cast<const PolynomialFamily*>(fam);
            const double sigma2 = poly->noise_variance();
            Eigen::Map<const Eigen::VectorXd> beta(theta.values.data(),
                                                   static_cast<Eigen::Index>(theta.values.size()));
            const double quad = suff.yty - 2.0 * suff.xty.dot(beta) + beta.dot(suff.xtx * beta);
            return temper * (suff.n * std::log(0.5) -
                             0.5 * suff.n * std::log(2.0 * kPi * sigma2) - quad / (2.0 * sigma2));
        }
        case FamilyCase::Generic:
            return temper * fam->log_likelihood(theta, data);
    }
    return -kInf;
}

void PosteriorCache::Impl::build(RngStream* stream) {
    ev.n_obs = data.n();
    ev.temper = temper;
    if (prior.built_for_n && *prior.built_for_n != static_cast<double>(data.n()))
        ev.n_mismatch_warning = true;

    if (!suff.support_ok) {
        ev.value = -kInf;
        ev.zero_likelihood = true;
        ev.method = EvidenceMethod::Conjugate;
        return;
    }

    EvidenceMethod method = spec.method;
    if (method == EvidenceMethod::Auto) {
        if (conjugate_available(*fam, prior))
            method = EvidenceMethod::Conjugate;
        else if (prior.complexity <= 2)
            method = EvidenceMethod::Quadrature;
        else
            method = EvidenceMethod::ImportanceSampling;
    }
    ev.method = method;
    switch (method) {
        case EvidenceMethod::Conjugate:
            if (!conjugate_available(*fam, prior))
                throw std::invalid_argument("no conjugate evidence for this family/prior pair");
            ev.value = conjugate_log_z(*fam, prior, suff, temper);
            break;
        case EvidenceMethod::Quadrature:
            if (prior.complexity > 2)
                throw std::invalid_argument("quadrature evidence is limited to K <= 2");
            run_quadrature();
            break;
        case EvidenceMethod::ImportanceSampling:
            run_importance(stream);
            break;
        case EvidenceMethod::Laplace:
            ev = laplace_log_partition(*fam, prior, data);
            ev.temper = temper;
            break;
        case EvidenceMethod::Auto:
            break;
    }
}

namespace {

struct AxisNodes {
    std::vector<double> x;
    std::vector<double> log_w;
};

AxisNodes axis_nodes(const Interval& box, double center, double scale, int total_nodes) {
    AxisNodes out;
    const double lo = box.lo, hi = box.hi;
    double a = center - 8.0 * scale, b = center + 8.0 * scale;
    a = std::max(a, lo);
    b = std::min(b, hi);
    const bool split = std::isfinite(a) && std::isfinite(b) && a > lo + 1e-12 * (hi - lo) &&
                       b < hi - 1e-12 * (hi - lo) && b > a;
    const auto add_panel = [&](double p_lo, double p_hi, int n) {
        if (!(p_hi > p_lo) || n <= 0) return;
        const QuadRule& rule = gauss_legendre(n);
        const double c = 0.5 * (p_hi + p_lo), h = 0.5 * (p_hi - p_lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            out.x.push_back(c + h * rule.nodes[i]);
            out.log_w.push_back(std::log(rule.weights[i] * h));
        }
    };
    if (split) {
        const int side = total_nodes / 4;
        add_panel(lo, a, side);
        add_panel(a, b, total_nodes - 2 * side);
        add_panel(b, hi, side);
    } else {
        add_panel(lo, hi, total_nodes);
    }
    return out;
}

}  // namespace

void PosteriorCache::Impl::run_quadrature() {
    const int k = prior.complexity;
    const TruncationDomain box = prior.domain ? *prior.domain : default_truncation(*fam, k);

    std::vector<double> center(static_cast<std::size_t>(k));
    std::vector<double> scale(static_cast<std::size_t>(k), kNan);
    try {
        const MleResult fit = fam->mle(data, k);
        center = fit.value.values;
        const Eigen::MatrixXd hess = fam->loglik_hessian(fit.value, data) * temper;
        const Eigen::MatrixXd neg = -hess;
        Eigen::LLT<Eigen::MatrixXd> llt(neg);
        if (llt.info() == Eigen::Success) {
            const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(k, k));
            for (int i = 0; i < k; ++i) scale[static_cast<std::size_t>(i)] = std::sqrt(cov(i, i));
        }
    } catch (const std::exception&) {
        // fall through to unsplit panels
    }
    for (int i = 0; i < k; ++i) {
        auto& s = scale[static_cast<std::size_t>(i)];
        if (!std::isfinite(s) || s <= 0.0) s = kInf;  // disables the split on this axis
        if (!std::isfinite(center[static_cast<std::size_t>(i)]))
            center[static_cast<std::size_t>(i)] = 0.5 * (box.box[static_cast<std::size_t>(i)].lo +
                                                         box.box[static_cast<std::size_t>(i)].hi);
    }

    nodes.clear();
    node_log_weight.clear();
    if (k == 1) {
        const AxisNodes ax = axis_nodes(box.box[0], center[0], scale[0], spec.quad_nodes);
        for (std::size_t i = 0; i < ax.x.size(); ++i) {
            nodes.push_back(Parameterization{fam->id(), {ax.x[i]}});
            node_log_weight.push_back(ax.log_w[i]);
        }
    } else {
        const AxisNodes ax = axis_nodes(box.box[0], center[0], scale[0], spec.quad_nodes);
        const AxisNodes ay = axis_nodes(box.box[1], center[1], scale[1], spec.quad_nodes);
        for (std::size_t i = 0; i < ax.x.size(); ++i)
            for (std::size_t j = 0; j < ay.x.size(); ++j) {
                nodes.push_back(Parameterization{fam->id(), {ax.x[i], ay.x[j]}});
                node_log_weight.push_back(ax.log_w[i] + ay.log_w[j]);
            }
    }

    std::vector<double> terms(nodes.size());
    node_log_posterior.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double lp = prior.log_density(nodes[i]);
        const double ll = std::isfinite(lp) ? tempered_loglik(nodes[i]) : -kInf;
        terms[i] = lp + ll + node_log_weight[i];
    }
    ev.value = log_sum_exp(terms);
    if (std::isinf(ev.value) && ev.value < 0) ev.zero_likelihood = true;
    for (std::size_t i = 0; i < nodes.size(); ++i) node_log_posterior[i] = terms[i] - ev.value;
}

void PosteriorCache::Impl::run_importance(RngStream* stream) {
    const int k = prior.complexity;
    RngStream local = stream ? stream->child(0) : RngStream(kInternalIsSeed);

    const auto log_target = [&](const Parameterization& theta) {
        const double lp = prior.log_density(theta);
        if (!std::isfinite(lp)) return -kInf;
        return lp + tempered_loglik(theta);
    };

    // Laplace-matched proposal at the posterior mode.
    std::vector<double> start;
    try {
        start = fam->mle(data, k).value.values;
    } catch (const ConvergenceError& e) {
        start = e.best_found.values;
    }
    const NelderMeadResult opt = nelder_mead(
        [&](const std::vector<double>& x) {
            const double v = log_target(Parameterization{fam->id(), x});
            return std::isfinite(v) ? -v : kInf;
        },
        start, NelderMeadOptions{.initial_step = 0.1});
    const Parameterization mode{fam->id(), opt.x};

    Eigen::MatrixXd hess(k, k);
    {
        // central differences of the log target around the mode
        const auto f = [&](std::vector<double> x) { return log_target(Parameterization{fam->id(), x}); };
        const double f0 = f(mode.values);
        for (int i = 0; i < k; ++i) {
            const double hi = 1e-4 * (1.0 + std::abs(mode.values[static_cast<std::size_t>(i)]));
            for (int j = i; j < k; ++j) {
                if (i == j) {
                    auto p = mode.values, m = mode.values;
                    p[static_cast<std::size_t>(i)] += hi;
                    m[static_cast<std::size_t>(i)] -= hi;
                    hess(i, i) = (f(p) - 2.0 * f0 + f(m)) / (hi * hi);
                } else {
                    const double hj = 1e-4 * (1.0 + std::abs(mode.values[static_cast<std::size_t>(j)]));
                    auto pp = mode.values, pm = mode.values, mp = mode.values, mm = mode.values;
                    pp[static_cast<std::size_t>(i)] += hi; pp[static_cast<std::size_t>(j)] += hj;
                    pm[static_cast<std::size_t>(i)] += hi; pm[static_cast<std::size_t>(j)] -= hj;
                    mp[static_cast<std::size_t>(i)] -= hi; mp[static_cast<std::size_t>(j)] += hj;
                    mm[static_cast<std::size_t>(i)] -= hi; mm[static_cast<std::size_t>(j)] -= hj;
                    hess(i, j) = hess(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hi * hj);
                }
            }
        }
    }
    Eigen::MatrixXd cov = -hess;
    Eigen::LLT<Eigen::MatrixXd> prec_llt(cov);
    if (prec_llt.info() != Eigen::Success)
        throw SingularityError("importance sampling: posterior curvature not positive definite");
    cov = prec_llt.solve(Eigen::MatrixXd::Identity(k, k)) *
          (spec.proposal_inflation * spec.proposal_inflation);
    Eigen::LLT<Eigen::MatrixXd> cov_llt(cov);
    const Eigen::MatrixXd chol = cov_llt.matrixL();
    double log_det_cov = 0.0;
    for (int i = 0; i < k; ++i) log_det_cov += 2.0 * std::log(chol(i, i));

    const std::size_t n = static_cast<std::size_t>(spec.is_draws);
    draws.clear();
    draws.reserve(n);
    std::vector<double> log_w(n);
    Eigen::VectorXd z(k), x(k);
    for (std::size_t it = 0; it < n; ++it) {
        for (int i = 0; i < k; ++i) z(i) = local.normal();
        x = chol * z;
        Parameterization theta{fam->id(), mode.values};
        for (int i = 0; i < k; ++i) theta.values[static_cast<std::size_t>(i)] += x(i);
        const double log_prop =
            -0.5 * k * kLogTwoPi - 0.5 * log_det_cov - 0.5 * z.squaredNorm();
        log_w[it] = log_target(theta) - log_prop;
        draws.push_back(std::move(theta));
    }

    const double log_max = *std::max_element(log_w.begin(), log_w.end());
    if (std::isinf(log_max) && log_max < 0) {
        ev.value = -kInf;
        ev.zero_likelihood = true;
        return;
    }
    double sum = 0.0, sum_sq = 0.0;
    for (double lw : log_w) {
        const double w = std::exp(lw - log_max);
        sum += w;
        sum_sq += w * w;
    }
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (double lw : log_w) {
        const double d = std::exp(lw - log_max) - mean;
        var += d * d;
    }
    var /= static_cast<double>(n - 1);
    const double rel_se = std::sqrt(var / static_cast<double>(n)) / mean;

    ev.value = log_max + std::log(mean) + 0.5 * rel_se * rel_se;  // removes the -s^2/2 log bias
    ev.std_error = rel_se;
    ev.ess = sum * sum / sum_sq;
    ev.low_ess_warning = ev.ess < 50.0;
    ev.bias_note = "residual O(1/n) bias after second-order log correction";

    draw_log_posterior.resize(n);
    const double log_sum = log_max + std::log(sum);
    for (std::size_t i = 0; i < n; ++i) draw_log_posterior[i] = log_w[i] - log_sum;
}

double PosteriorCache::Impl::conjugate_predictive(const Observation& x) const {
    SuffStats updated = suff;
    updated.add(x);
    if (!updated.support_ok) return -kInf;
    return conjugate_log_z(*fam, prior, updated, 1.0) - ev.value;
}

// ---------------------------------------------------------------------------

PosteriorCache::PosteriorCache(const ModelFamily& family, const Prior& prior, const Dataset& data,
                               EvidenceSpec spec, double temper, RngStream* stream)
    : impl_(std::make_unique<Impl>()) {
    if (data.empty()) throw std::invalid_argument("evidence: empty dataset");
    if (prior.family == nullptr || (prior.family != &family && prior.family->id() != family.id()))
        throw std::invalid_argument("evidence: prior belongs to a different family");
    if (!(temper > 0.0)) throw std::invalid_argument("evidence: temper must be positive");
    impl_->fam = &family;
    impl_->prior = prior;
    impl_->data = data;
    impl_->spec = spec;
    impl_->temper = temper;
    impl_->suff = build_suff(family, data, prior.complexity);
    impl_->build(stream);
}

PosteriorCache::~PosteriorCache() = default;
PosteriorCache::PosteriorCache(PosteriorCache&&) noexcept = default;
PosteriorCache& PosteriorCache::operator=(PosteriorCache&&) noexcept = default;

const LogEvidence& PosteriorCache::evidence() const { return impl_->ev; }

double PosteriorCache::log_predictive(const Observation& x) const {
    Impl& im = *impl_;
    if (im.temper != 1.0)
        throw std::logic_error("log_predictive: defined for the untempered posterior only");
    switch (im.ev.method) {
        case EvidenceMethod::Conjugate:
            return im.conjugate_predictive(x);
        case EvidenceMethod::Quadrature: {
            std::vector<double> terms(im.nodes.size());
            for (std::size_t i = 0; i < im.nodes.size(); ++i)
                terms[i] = im.node_log_posterior[i] + im.fam->log_density(im.nodes[i], x);
            return log_sum_exp(terms);
        }
        case EvidenceMethod::ImportanceSampling: {
            std::vector<double> terms(im.draws.size());
            for (std::size_t i = 0; i < im.draws.size(); ++i)
                terms[i] = im.draw_log_posterior[i] + im.fam->log_density(im.draws[i], x);
            return log_sum_exp(terms);
        }
        default:
            throw std::logic_error("log_predictive: unsupported evidence method");
    }
}

double PosteriorCache::posterior_log_density(const Parameterization& theta) const {
    const Impl& im = *impl_;
    const double lp = im.prior.log_density(theta);
    if (!std::isfinite(lp)) return -kInf;
    return lp + im.tempered_loglik(theta) - im.ev.value;
}

double PosteriorCache::tempered_log_likelihood(const Parameterization& theta) const {
    return impl_->tempered_loglik(theta);
}

const ModelFamily& PosteriorCache::family() const { return *impl_->fam; }
const Prior& PosteriorCache::prior() const { return impl_->prior; }
const Dataset& PosteriorCache::data() const { return impl_->data; }

// ---------------------------------------------------------------------------

LogEvidence log_partition(const ModelFamily& family, const Prior& prior, const Dataset& data,
                          EvidenceSpec spec, RngStream* stream) {
    return PosteriorCache(family, prior, data, spec, 1.0, stream).evidence();
}

LogEvidence tempered_log_partition(const ModelFamily& family, const Prior& prior,
                                   const Dataset& data, double temper, EvidenceSpec spec,
                                   RngStream* stream) {
    return PosteriorCache(family, prior, data, spec, temper, stream).evidence();
}

double free_energy(const ModelFamily& family, const Prior& prior, const Dataset& data,
                   EvidenceSpec spec, RngStream* stream) {
    return -log_partition(family, prior, data, spec, stream).value;
}

double posterior_log_density(const ModelFamily& family, const Prior& prior, const Dataset& data,
                             const Parameterization& theta, EvidenceSpec spec) {
    return PosteriorCache(family, prior, data, spec).posterior_log_density(theta);
}

double log_predictive(const ModelFamily& family, const Prior& prior, const Dataset& data,
                      const Observation& x, EvidenceSpec spec) {
    return PosteriorCache(family, prior, data, spec).log_predictive(x);
}

LogEvidence laplace_log_partition(const ModelFamily& family, const Prior& prior,
                                  const Dataset& data) {
    const MleResult fit = family.mle(data, prior.complexity);
    const int k = prior.complexity;
    const Eigen::MatrixXd neg_hess = -family.loglik_hessian(fit.value, data);
    Eigen::LLT<Eigen::MatrixXd> llt(neg_hess);
    if (llt.info() != Eigen::Success)
        throw SingularityError("laplace evidence: Hessian not negative definite at the MLE");
    double log_det = 0.0;
    for (int i = 0; i < k; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
    LogEvidence ev;
    ev.method = EvidenceMethod::Laplace;
    ev.n_obs = data.n();
    if (prior.built_for_n && *prior.built_for_n != static_cast<double>(data.n()))
        ev.n_mismatch_warning = true;
    ev.value = fit.log_likelihood + prior.log_density(fit.value) + 0.5 * k * kLogTwoPi -
               0.5 * log_det;
    return ev;
}

}  // namespace wprior
