#include "wprior/posterior.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "wprior/families.hpp"
#include "wprior/math.hpp"
#include "wprior/optimize.hpp"

namespace wprior {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

struct GaussSuff {
    double n = 0.0, mean = 0.0, css = 0.0;
};

GaussSuff gauss_suff(const Dataset& data) {
    GaussSuff s;
    for (const Observation& p : data.points) {
        s.n += 1.0;
        const double prev = s.mean;
        s.mean += (p.x - s.mean) / s.n;
        s.css += (p.x - prev) * (p.x - s.mean);
    }
    return s;
}

bool conjugate_sampler_available(const ModelFamily& family, const Prior& prior) {
    const std::string id = family.id();
    const bool standard_kind = prior.kind == PriorKind::Flat || prior.kind == PriorKind::Jeffreys ||
                               prior.kind == PriorKind::WPrior;
    if (id == "gauss_mean") return standard_kind || prior.kind == PriorKind::Gaussian;
    if (id == "bernoulli" || id == "exponential" || id == "gauss_mv" || id == "poly")
        return standard_kind;
    return false;
}

Parameterization conjugate_draw(const ModelFamily& family, const Prior& prior, const Dataset& data,
                                RngStream& stream) {
    const std::string id = family.id();
    const bool jeffreys_like = prior.kind == PriorKind::Jeffreys || prior.kind == PriorKind::WPrior;
    if (id == "gauss_mean") {
        const auto& fam = static_cast<const GaussMeanFamily&>(family);
        const GaussSuff s = gauss_suff(data);
        double post_mean = s.mean, post_var = fam.variance() / s.n;
        if (prior.kind == PriorKind::Gaussian) {
            const double prec = s.n / fam.variance() + 1.0 / prior.params[1];
            post_var = 1.0 / prec;
            post_mean = post_var * (s.n * s.mean / fam.variance() + prior.params[0] / prior.params[1]);
        }
        return {id, {stream.normal(post_mean, std::sqrt(post_var))}};
    }
    if (id == "bernoulli") {
        double heads = 0.0;
        for (const Observation& p : data.points) heads += p.x;
        const double tails = static_cast<double>(data.n()) - heads;
        const double a = jeffreys_like ? 0.5 : 1.0;
        return {id, {stream.beta(heads + a, tails + a)}};
    }
    if (id == "exponential") {
        double sum = 0.0;
        for (const Observation& p : data.points) sum += p.x;
        const double a = jeffreys_like ? 0.0 : 1.0;
        return {id, {stream.gamma(static_cast<double>(data.n()) + a, sum)}};
    }
    if (id == "gauss_mv") {
        const GaussSuff s = gauss_suff(data);
        const double g = jeffreys_like ? -1.5 : 0.0;
        const double shape = 0.5 * s.n - g - 1.5;
        if (!(shape > 0.0) || !(s.css > 0.0))
            throw SingularityError("posterior_sample: degenerate gauss_mv posterior");
        const double v = 0.5 * s.css / stream.gamma(shape, 1.0);
        const double mu = stream.normal(s.mean, std::sqrt(v / s.n));
        return {id, {mu, v}};
    }
    if (id == "poly") {
        const auto& fam = static_cast<const PolynomialFamily&>(family);
        const int k = prior.complexity;
        Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(k, k);
        Eigen::VectorXd xty = Eigen::VectorXd::Zero(k);
        Eigen::VectorXd row(k);
        for (const Observation& p : data.points) {
            double pw = 1.0;
            for (int j = 0; j < k; ++j) {
                row(j) = pw;
                pw *= p.x;
            }
            xtx += row * row.transpose();
            xty += row * p.y;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(xtx);
        if (llt.info() != Eigen::Success)
            throw SingularityError("posterior_sample: rank-deficient design");
        const Eigen::VectorXd beta_hat = llt.solve(xty);
        const Eigen::MatrixXd cov =
            llt.solve(Eigen::MatrixXd::Identity(k, k)) * fam.noise_variance();
        Eigen::LLT<Eigen::MatrixXd> cov_llt(cov);
        Eigen::VectorXd z(k);
        for (int i = 0; i < k; ++i) z(i) = stream.normal();
        const Eigen::VectorXd beta = beta_hat + Eigen::MatrixXd(cov_llt.matrixL()) * z;
        return {id, std::vector<double>(beta.data(), beta.data() + k)};
    }
    throw std::logic_error("conjugate_draw: unsupported family");
}

}  // namespace

PosteriorDraws posterior_sample(const ModelFamily& family, const Prior& prior, const Dataset& data,
                                std::size_t n_draws, RngStream stream, EvidenceSpec spec) {
    PosteriorDraws out;
    out.draws.reserve(n_draws);

    if (conjugate_sampler_available(family, prior)) {
        for (std::size_t i = 0; i < n_draws; ++i) {
            // Rejection keeps draws exact under a truncation domain.
            for (int tries = 0;; ++tries) {
                Parameterization theta = conjugate_draw(family, prior, data, stream);
                if (!prior.domain || prior.domain->contains(theta)) {
                    out.draws.push_back(std::move(theta));
                    break;
                }
                if (tries > 100000)
                    throw std::runtime_error(
                        "posterior_sample: domain rejection failed; posterior mass outside the box");
            }
        }
        return out;
    }

    // Random-walk Metropolis on the (possibly tempered-free) posterior.
    const PosteriorCache cache(family, prior, data, spec);
    const int k = prior.complexity;
    const auto log_target = [&](const Parameterization& theta) {
        const double lp = prior.log_density(theta);
        if (!std::isfinite(lp)) return -kInf;
        return lp + cache.tempered_log_likelihood(theta);
    };

    std::vector<double> start;
    try {
        start = family.mle(data, k).value.values;
    } catch (const ConvergenceError& e) {
        start = e.best_found.values;
    }
    const NelderMeadResult map_fit = nelder_mead(
        [&](const std::vector<double>& x) {
            const double v = log_target(Parameterization{family.id(), x});
            return std::isfinite(v) ? -v : kInf;
        },
        start, NelderMeadOptions{.initial_step = 0.1});
    Parameterization current{family.id(), map_fit.x};
    if (!std::isfinite(log_target(current))) current = Parameterization{family.id(), start};

    std::vector<double> step(static_cast<std::size_t>(k), 0.1);
    try {
        const Eigen::MatrixXd neg_hess = -family.loglik_hessian(current, data);
        Eigen::LLT<Eigen::MatrixXd> llt(neg_hess);
        if (llt.info() == Eigen::Success) {
            const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(k, k));
            for (int i = 0; i < k; ++i)
                step[static_cast<std::size_t>(i)] = 2.4 * std::sqrt(cov(i, i) / k);
        }
    } catch (const std::exception&) {
    }

    McmcDiagnostics diag;
    diag.burn_in = 1000;
    double current_log = log_target(current);
    std::size_t accepted = 0;
    const std::size_t total = diag.burn_in + n_draws;
    for (std::size_t it = 0; it < total; ++it) {
        Parameterization proposal = current;
        for (int i = 0; i < k; ++i)
            proposal.values[static_cast<std::size_t>(i)] +=
                step[static_cast<std::size_t>(i)] * stream.normal();
        const double prop_log = log_target(proposal);
        if (std::log(stream.uniform()) < prop_log - current_log) {
            current = std::move(proposal);
            current_log = prop_log;
            if (it >= diag.burn_in) ++accepted;
        }
        if (it >= diag.burn_in) out.draws.push_back(current);
    }
    diag.accept_rate = static_cast<double>(accepted) / static_cast<double>(n_draws);

    // Split-chain potential scale reduction over four consecutive segments.
    const std::size_t seg = n_draws / 4;
    if (seg >= 2) {
        double rhat_max = 0.0;
        for (int coord = 0; coord < k; ++coord) {
            std::vector<double> seg_mean(4, 0.0), seg_var(4, 0.0);
            for (int c = 0; c < 4; ++c) {
                std::vector<double> vals;
                vals.reserve(seg);
                for (std::size_t i = 0; i < seg; ++i)
                    vals.push_back(out.draws[c * seg + i].values[static_cast<std::size_t>(coord)]);
                const SampleStats st = sample_stats(vals);
                seg_mean[c] = st.mean;
                seg_var[c] = st.sd * st.sd;
            }
            const SampleStats between = sample_stats(seg_mean);
            const double b = static_cast<double>(seg) * between.sd * between.sd;
            const double w = (seg_var[0] + seg_var[1] + seg_var[2] + seg_var[3]) / 4.0;
            if (w > 0.0) {
                const double var_plus = (static_cast<double>(seg) - 1.0) / seg * w + b / seg;
                rhat_max = std::max(rhat_max, std::sqrt(var_plus / w));
            } else if (b > 0.0) {
                rhat_max = kInf;  // segments moved but never mixed
            }
        }
        diag.split_rhat = rhat_max;
    }
    if (accepted == 0) diag.split_rhat = kInf;  // chain never moved after burn-in
    diag.quality_warning = diag.split_rhat > 1.05;
    out.mcmc = diag;
    return out;
}

}  // namespace wprior
