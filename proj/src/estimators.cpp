#include "wprior/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "wprior/math.hpp"
#include "wprior/prior.hpp"

namespace wprior {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Runs body(i, stream.child(i)) across replicates, mapping exceptions to
/// NaN so the reduction can enforce the failure budget.
std::vector<double> replicate_values(std::size_t n, const RngStream& stream,
                                     const std::function<double(std::size_t, RngStream&)>& body) {
    std::vector<double> values(n);
    parallel_for(n, [&](std::size_t i) {
        RngStream s = stream.child(i);
        try {
            values[i] = body(i, s);
        } catch (const std::exception&) {
            values[i] = kNan;
        }
    });
    return values;
}

double mean_log_predictive(const PosteriorCache& cache, const ModelFamily& family,
                           const Parameterization& theta0, std::size_t n_inner, RngStream& si) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_inner; ++j) {
        RngStream sj = si.child(1 + j);
        acc += cache.log_predictive(family.sample_one(theta0, sj));
    }
    return acc / static_cast<double>(n_inner);
}

}  // namespace

Estimate paired_difference(const std::vector<double>& a, const std::vector<double>& b,
                           const RngStream& stream) {
    if (a.size() != b.size()) throw std::invalid_argument("paired_difference: length mismatch");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return reduce_samples(d, stream);
}

Estimate performance_post(const ModelFamily& family, const Parameterization& theta0,
                          const Prior& prior, std::size_t n_obs, const Budgets& budgets,
                          const RngStream& stream, EvidenceSpec spec) {
    family.require_in_domain(theta0);
    const auto values = replicate_values(
        budgets.n_outer, stream, [&](std::size_t, RngStream& si) {
            RngStream s_data = si.child(0);
            RngStream s_mc = si.child(1);
            const Dataset data = family.sample(theta0, n_obs, s_data);
            return PosteriorCache(family, prior, data, spec, 1.0, &s_mc).evidence().value;
        });
    return reduce_samples(values, stream);
}

Estimate predictivity(const ModelFamily& family, const Parameterization& theta0,
                      const Prior& prior, std::size_t n_obs, const Budgets& budgets,
                      const RngStream& stream, EvidenceSpec spec) {
    family.require_in_domain(theta0);
    const double n_scale = static_cast<double>(n_obs);
    const auto values = replicate_values(
        budgets.n_outer, stream, [&](std::size_t, RngStream& si) {
            RngStream s_data = si.child(0);
            RngStream s_mc = si.child(1);
            const Dataset data = family.sample(theta0, n_obs, s_data);
            const PosteriorCache cache(family, prior, data, spec, 1.0, &s_mc);
            return n_scale * mean_log_predictive(cache, family, theta0, budgets.n_inner, si);
        });
    return reduce_samples(values, stream);
}

MultiplicityResult multiplicity_direct(const ModelFamily& family, const Parameterization& theta0,
                                       const Prior& prior, std::size_t n_obs,
                                       const Budgets& budgets, const RngStream& stream,
                                       EvidenceSpec spec) {
    family.require_in_domain(theta0);
    const double n_scale = static_cast<double>(n_obs);
    const auto values = replicate_values(
        budgets.n_outer, stream, [&](std::size_t, RngStream& si) {
            RngStream s_data = si.child(0);
            RngStream s_mc = si.child(1);
            const Dataset data = family.sample(theta0, n_obs, s_data);
            const PosteriorCache cache(family, prior, data, spec, 1.0, &s_mc);
            const double log_z = cache.evidence().value;
            return log_z - n_scale * mean_log_predictive(cache, family, theta0, budgets.n_inner, si);
        });
    MultiplicityResult r;
    r.log_m = reduce_samples(values, stream);
    r.method = "direct";
    r.n_obs = n_obs;
    r.prior_desc = prior.describe();
    r.theta0 = theta0;
    return r;
}

MultiplicityResult multiplicity_cv(const ModelFamily& family, const Parameterization& theta0,
                                   const Prior& prior, std::size_t n_obs, const Budgets& budgets,
                                   const RngStream& stream, EvidenceSpec spec) {
    family.require_in_domain(theta0);
    std::atomic<std::size_t> mcmc_warnings{0};
    const auto values = replicate_values(
        budgets.n_outer, stream, [&](std::size_t, RngStream& si) {
            RngStream s_x = si.child(0);
            RngStream s_y = si.child(1);
            const Dataset x = family.sample(theta0, n_obs, s_x);
            const Dataset y = family.sample(theta0, n_obs, s_y);
            const PosteriorCache cache_x(family, prior, x, spec);
            const PosteriorDraws draws = posterior_sample(family, prior, y, budgets.n_inner,
                                                          si.child(2), spec);
            if (draws.mcmc && draws.mcmc->quality_warning) ++mcmc_warnings;
            double acc = 0.0;
            for (const Parameterization& theta : draws.draws)
                acc += prior.log_density(theta) - cache_x.posterior_log_density(theta);
            return acc / static_cast<double>(draws.draws.size());
        });
    MultiplicityResult r;
    r.log_m = reduce_samples(values, stream);
    r.method = "cross_validation";
    r.n_obs = n_obs;
    r.prior_desc = prior.describe();
    r.theta0 = theta0;
    r.mcmc_warnings = mcmc_warnings.load();
    return r;
}

void TemperSchedule::validate() const {
    if (taus.size() < 2) throw std::invalid_argument("temper schedule: need at least two exponents");
    bool has_one = false;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!(taus[i] > 0.0)) throw std::invalid_argument("temper schedule: exponents must be positive");
        if (i > 0 && !(taus[i] > taus[i - 1]))
            throw std::invalid_argument("temper schedule: exponents must be strictly increasing");
        if (taus[i] == 1.0) has_one = true;
    }
    if (!has_one) throw std::invalid_argument("temper schedule: must contain tau = 1");
    if (stencil != 3 && stencil != 5) throw std::invalid_argument("temper schedule: stencil must be 3 or 5");
    if (stencil == 5 && taus.size() < 5)
        throw std::invalid_argument("temper schedule: 5-point stencil needs five exponents");
}

std::vector<double> TemperSchedule::stencil_taus() const {
    validate();
    if (stencil == 5 || taus.size() == 3) return taus;
    const auto it = std::find(taus.begin(), taus.end(), 1.0);
    const std::size_t idx = static_cast<std::size_t>(it - taus.begin());
    if (idx == 0 || idx + 1 >= taus.size())
        throw std::invalid_argument("temper schedule: tau = 1 needs a neighbor on each side");
    return {taus[idx - 1], taus[idx], taus[idx + 1]};
}

EntropyResult gibbs_entropy(const ModelFamily& family, const Parameterization& theta0,
                            const Prior& prior, std::size_t n_obs, const TemperSchedule& schedule,
                            const Budgets& budgets, const RngStream& stream, EvidenceSpec spec) {
    family.require_in_domain(theta0);
    const std::vector<double> taus = schedule.stencil_taus();

    std::vector<std::size_t> realized(taus.size());
    std::vector<double> temps(taus.size());
    for (std::size_t k = 0; k < taus.size(); ++k) {
        realized[k] = static_cast<std::size_t>(std::llround(taus[k] * static_cast<double>(n_obs)));
        if (realized[k] < 2) throw std::invalid_argument("gibbs_entropy: schedule reaches below 2 observations");
        if (k > 0 && realized[k] <= realized[k - 1])
            throw std::invalid_argument("gibbs_entropy: schedule nodes collide at this n; widen the taus");
        temps[k] = 1.0 / static_cast<double>(realized[k]);
    }
    const std::size_t n_max = realized.back();
    const std::vector<double> weights =
        fd_weights(1.0 / static_cast<double>(n_obs), temps, 1);

    std::vector<double> f_sum(taus.size(), 0.0);
    std::vector<double> values(budgets.n_outer);
    std::vector<std::vector<double>> f_raw(budgets.n_outer,
                                           std::vector<double>(taus.size(), kNan));
    parallel_for(budgets.n_outer, [&](std::size_t i) {
        RngStream si = stream.child(i);
        try {
            RngStream s_data = si.child(0);
            const Dataset master = family.sample(theta0, n_max, s_data);
            // cumulative log-density under theta0: the control variate
            std::vector<double> cum(n_max + 1, 0.0);
            for (std::size_t j = 0; j < n_max; ++j)
                cum[j + 1] = cum[j] + family.log_density(theta0, master.points[j]);
            double s_val = 0.0;
            for (std::size_t k = 0; k < taus.size(); ++k) {
                RngStream s_mc = si.child(1 + k);
                const Dataset prefix = master.prefix(realized[k]);
                const double log_z =
                    PosteriorCache(family, prior, prefix, spec, 1.0, &s_mc).evidence().value;
                const double f_centered = -temps[k] * (log_z - cum[realized[k]]);
                f_raw[i][k] = -temps[k] * log_z;
                s_val += -weights[k] * f_centered;
            }
            values[i] = s_val;
        } catch (const std::exception&) {
            values[i] = kNan;
        }
    });

    EntropyResult result;
    result.value = reduce_samples(values, stream);
    result.taus = taus;
    result.realized_n.assign(realized.begin(), realized.end());
    result.free_energy.assign(taus.size(), 0.0);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < budgets.n_outer; ++i) {
        if (!std::isfinite(values[i])) continue;
        ++kept;
        for (std::size_t k = 0; k < taus.size(); ++k) result.free_energy[k] += f_raw[i][k];
    }
    for (double& f : result.free_energy) f /= static_cast<double>(kept);
    result.inconclusive = result.value.std_error > std::abs(result.value.mean) &&
                          result.value.std_error > 0.5;
    return result;
}

Estimate coding_information(const ModelFamily& family, const Parameterization& theta0,
                            const Prior& proper_prior, std::size_t n_obs, const Budgets& budgets,
                            const RngStream& stream, EvidenceSpec spec) {
    family.require_in_domain(theta0);
    if (!proper_prior.is_proper)
        throw std::invalid_argument("coding_information: prior must be proper (normalized)");
    const auto values = replicate_values(
        budgets.n_outer, stream, [&](std::size_t, RngStream& si) {
            RngStream s_x = si.child(0);
            RngStream s_y = si.child(1);
            const Dataset x = family.sample(theta0, n_obs, s_x);
            const Dataset y = family.sample(theta0, n_obs, s_y);
            const PosteriorCache cache_y(family, proper_prior, y, spec);
            const PosteriorDraws draws =
                posterior_sample(family, proper_prior, x, budgets.n_inner, si.child(2), spec);
            double acc = 0.0;
            for (const Parameterization& theta : draws.draws)
                acc += cache_y.posterior_log_density(theta) - proper_prior.log_density(theta);
            return acc / static_cast<double>(draws.draws.size());
        });
    return reduce_samples(values, stream);
}

Estimate avg_coding_information(const ModelFamily& family, const Prior& proper_prior,
                                std::size_t n_obs, const Budgets& budgets,
                                const RngStream& stream, EvidenceSpec spec) {
    if (!proper_prior.is_proper)
        throw std::invalid_argument("avg_coding_information: prior must be proper");
    std::vector<double> values(budgets.n_theta0);
    parallel_for(budgets.n_theta0, [&](std::size_t t) {
        RngStream st = stream.child(t);
        try {
            RngStream s_theta = st.child(0);
            const Parameterization theta0 = sample_prior(proper_prior, s_theta);
            Budgets inner = budgets;
            values[t] = coding_information(family, theta0, proper_prior, n_obs, inner,
                                           st.child(1), spec)
                            .mean;
        } catch (const std::exception&) {
            values[t] = kNan;
        }
    });
    return reduce_samples(values, stream);
}

std::vector<OptimalityRow> true_prior_optimality(
    const ModelFamily& family, const Prior& pi0,
    const std::vector<std::pair<std::string, Prior>>& candidates, std::size_t n_obs,
    const Budgets& budgets, const RngStream& stream, EvidenceSpec spec) {
    if (!pi0.is_proper) throw std::invalid_argument("true_prior_optimality: pi0 must be proper");
    for (const auto& [name, prior] : candidates)
        if (!prior.is_proper)
            throw std::invalid_argument("true_prior_optimality: candidate '" + name +
                                        "' must be proper");

    std::vector<OptimalityRow> rows(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        rows[c].name = candidates[c].first;
        rows[c].perf_post_values.resize(budgets.n_outer);
        rows[c].perf_pre_values.resize(budgets.n_outer);
    }

    const double n_scale = static_cast<double>(n_obs);
    parallel_for(budgets.n_outer, [&](std::size_t i) {
        RngStream si = stream.child(i);
        try {
            RngStream s_theta = si.child(0);
            RngStream s_data = si.child(1);
            const Parameterization theta0 = sample_prior(pi0, s_theta);
            const Dataset data = family.sample(theta0, n_obs, s_data);
            std::vector<Observation> fresh(budgets.n_inner);
            for (std::size_t j = 0; j < budgets.n_inner; ++j) {
                RngStream sj = si.child(2 + j);
                fresh[j] = family.sample_one(theta0, sj);
            }
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                const PosteriorCache cache(family, candidates[c].second, data, spec);
                rows[c].perf_post_values[i] = cache.evidence().value;
                double acc = 0.0;
                for (const Observation& x : fresh) acc += cache.log_predictive(x);
                rows[c].perf_pre_values[i] = n_scale * acc / static_cast<double>(budgets.n_inner);
            }
        } catch (const std::exception&) {
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                rows[c].perf_post_values[i] = kNan;
                rows[c].perf_pre_values[i] = kNan;
            }
        }
    });
    for (OptimalityRow& row : rows) {
        row.perf_post = reduce_samples(row.perf_post_values, stream);
        row.perf_pre = reduce_samples(row.perf_pre_values, stream);
    }
    return rows;
}

}  // namespace wprior
