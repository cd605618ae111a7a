#pragma once

#include <memory>
#include <optional>
#include <string>

#include "wprior/dataset.hpp"
#include "wprior/family.hpp"
#include "wprior/prior.hpp"
#include "wprior/rng.hpp"

#include "json.hpp"

namespace wprior {

enum class EvidenceMethod { Auto, Conjugate, Quadrature, ImportanceSampling, Laplace };

std::string to_string(EvidenceMethod method);

struct EvidenceSpec {
    EvidenceMethod method = EvidenceMethod::Auto;
    int quad_nodes = 256;             // per dimension, split across panels
    int is_draws = 10000;
    double proposal_inflation = 1.5;  // importance proposal widening
};

/// log Z with provenance and diagnostics. std_error is 0 exactly when the
/// method is deterministic.
struct LogEvidence {
    double value = 0.0;
    double std_error = 0.0;
    EvidenceMethod method = EvidenceMethod::Conjugate;
    std::size_t n_obs = 0;
    double temper = 1.0;
    double ess = 0.0;                 // importance-sampling effective sample size
    bool zero_likelihood = false;
    bool low_ess_warning = false;
    bool n_mismatch_warning = false;  // prior built for a different n
    std::string bias_note;

    nlohmann::json to_json() const;
};

/// Evaluates the partition function of (family, prior, data) once and
/// answers repeated posterior-density and predictive queries cheaply
/// (sufficient statistics for conjugate pairs, reused nodes or draws
/// otherwise). `temper` raises the whole-data likelihood to a fractional
/// power.
class PosteriorCache {
public:
    PosteriorCache(const ModelFamily& family, const Prior& prior, const Dataset& data,
                   EvidenceSpec spec = {}, double temper = 1.0, RngStream* stream = nullptr);
    ~PosteriorCache();
    PosteriorCache(PosteriorCache&&) noexcept;
    PosteriorCache& operator=(PosteriorCache&&) noexcept;

    const LogEvidence& evidence() const;
    /// log q(x | data, prior); defined at temper == 1 only.
    double log_predictive(const Observation& x) const;
    /// log posterior density at theta: log prior + temper * loglik - log Z.
    double posterior_log_density(const Parameterization& theta) const;
    /// temper * log-likelihood via cached sufficient statistics.
    double tempered_log_likelihood(const Parameterization& theta) const;

    const ModelFamily& family() const;
    const Prior& prior() const;
    const Dataset& data() const;

    struct Impl;
    Impl& impl() { return *impl_; }
    const Impl& impl() const { return *impl_; }

private:
    std::unique_ptr<Impl> impl_;
};

/// The Bayes partition function: log of the prior-weighted likelihood
/// integral. Auto method picks conjugate > quadrature (K <= 2) > importance
/// sampling.
LogEvidence log_partition(const ModelFamily& family, const Prior& prior, const Dataset& data,
                          EvidenceSpec spec = {}, RngStream* stream = nullptr);

/// Same with the whole-data likelihood raised to `temper`.
LogEvidence tempered_log_partition(const ModelFamily& family, const Prior& prior,
                                   const Dataset& data, double temper, EvidenceSpec spec = {},
                                   RngStream* stream = nullptr);

/// Bayesian free energy, minus log Z. Diagnostics available through
/// log_partition; errors propagate.
double free_energy(const ModelFamily& family, const Prior& prior, const Dataset& data,
                   EvidenceSpec spec = {}, RngStream* stream = nullptr);

double posterior_log_density(const ModelFamily& family, const Prior& prior, const Dataset& data,
                             const Parameterization& theta, EvidenceSpec spec = {});

/// log q(x | data, prior) = log Z(data + x) - log Z(data).
double log_predictive(const ModelFamily& family, const Prior& prior, const Dataset& data,
                      const Observation& x, EvidenceSpec spec = {});

/// Second-order expansion around the maximum-likelihood point:
/// log q(data|mle) + log prior(mle) + (K/2) log 2pi - 0.5 log det(-H).
LogEvidence laplace_log_partition(const ModelFamily& family, const Prior& prior,
                                  const Dataset& data);

}  // namespace wprior
