#pragma once

#include <optional>
#include <vector>

#include "wprior/evidence.hpp"

namespace wprior {

struct McmcDiagnostics {
    double accept_rate = 0.0;
    double split_rhat = 1.0;    // potential scale reduction over chain quarters
    std::size_t burn_in = 0;
    bool quality_warning = false;
};

struct PosteriorDraws {
    std::vector<Parameterization> draws;
    std::optional<McmcDiagnostics> mcmc;  // set when the random-walk sampler ran
};

/// Draws from the posterior of (family, prior, data): exact conjugate
/// samplers where available (with rejection against a truncation domain),
/// otherwise random-walk Metropolis with acceptance-rate and split-chain
/// diagnostics attached.
PosteriorDraws posterior_sample(const ModelFamily& family, const Prior& prior, const Dataset& data,
                                std::size_t n_draws, RngStream stream, EvidenceSpec spec = {});

}  // namespace wprior
