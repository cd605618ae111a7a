#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "wprior/families.hpp"
#include "wprior/math.hpp"
#include "wprior/posterior.hpp"

#include "oracles.hpp"

using namespace wprior;

namespace {

Parameterization param(const ModelFamily& f, std::vector<double> v) {
    return Parameterization{f.id(), std::move(v)};
}

SampleStats coord_stats(const std::vector<Parameterization>& draws, std::size_t coord) {
    std::vector<double> values;
    values.reserve(draws.size());
    for (const Parameterization& d : draws) values.push_back(d.values[coord]);
    return sample_stats(values);
}

/// A flat prior routed through the Custom kind, so the sampler has no
/// conjugate shortcut and must fall back to the random walk.
Prior opaque_flat(const ModelFamily& family, int k) {
    Prior p = flat_prior(family, k, 0.0);
    p.kind = PriorKind::Custom;
    p.custom_log_density = [](const Parameterization&) { return 0.0; };
    return p;
}

}  // namespace

TEST_CASE("conjugate gaussian draws match posterior moments") {
    const ModelFamily& gauss = family_registry("gauss_mean");
    RngStream s(5150);
    const Dataset data = gauss.sample(param(gauss, {1.2}), 50, s);
    double mean = 0.0;
    for (const Observation& p : data.points) mean += p.x;
    mean /= 50.0;

    const Prior flat = flat_prior(gauss, 1, 0.0);
    const std::size_t n = 20000;
    const PosteriorDraws draws = posterior_sample(gauss, flat, data, n, RngStream(99));
    REQUIRE(draws.draws.size() == n);
    CHECK_FALSE(draws.mcmc.has_value());
    const SampleStats st = coord_stats(draws.draws, 0);
    const double post_sd = 1.0 / std::sqrt(50.0);
    CHECK(std::abs(st.mean - mean) < 4.0 * post_sd / std::sqrt(static_cast<double>(n)));
    CHECK(st.sd == doctest::Approx(post_sd).epsilon(0.05));
}

TEST_CASE("posterior draws are reproducible from the stream") {
    const ModelFamily& bern = family_registry("bernoulli");
    RngStream s(8);
    const Dataset coin = bern.sample(param(bern, {0.3}), 40, s);
    const Prior jp = jeffreys_prior(bern, 1);
    const PosteriorDraws a = posterior_sample(bern, jp, coin, 200, RngStream(313));
    const PosteriorDraws b = posterior_sample(bern, jp, coin, 200, RngStream(313));
    for (std::size_t i = 0; i < 200; ++i) REQUIRE(a.draws[i].values[0] == b.draws[i].values[0]);
}

TEST_CASE("beta and gamma conjugate draws have the right means") {
    const ModelFamily& bern = family_registry("bernoulli");
    RngStream s(21);
    const Dataset coin = bern.sample(param(bern, {0.25}), 60, s);
    double heads = 0.0;
    for (const Observation& p : coin.points) heads += p.x;
    const Prior jp = jeffreys_prior(bern, 1);
    const PosteriorDraws draws = posterior_sample(bern, jp, coin, 30000, RngStream(4));
    const double expect = (heads + 0.5) / 61.0;
    const SampleStats st = coord_stats(draws.draws, 0);
    CHECK(st.mean == doctest::Approx(expect).epsilon(0.01));

    const ModelFamily& expo = family_registry("exponential");
    const Dataset waits = expo.sample(param(expo, {2.0}), 60, s);
    double total = 0.0;
    for (const Observation& p : waits.points) total += p.x;
    const PosteriorDraws gdraws =
        posterior_sample(expo, jeffreys_prior(expo, 1), waits, 30000, RngStream(5));
    const SampleStats gst = coord_stats(gdraws.draws, 0);
    CHECK(gst.mean == doctest::Approx(60.0 / total).epsilon(0.01));
}

TEST_CASE("gauss_mv conjugate draws: variance marginal is inverse-gamma") {
    const ModelFamily& mv = family_registry("gauss_mv");
    RngStream s(31);
    const Dataset data = mv.sample(param(mv, {0.0, 2.0}), 80, s);
    double mean = 0.0, css = 0.0;
    for (const Observation& p : data.points) mean += p.x;
    mean /= 80.0;
    for (const Observation& p : data.points) css += (p.x - mean) * (p.x - mean);

    const PosteriorDraws draws =
        posterior_sample(mv, jeffreys_prior(mv, 2), data, 40000, RngStream(6));
    const SampleStats vst = coord_stats(draws.draws, 1);
    // v ~ InvGamma(n/2, css/2): mean = css / (n - 2)
    CHECK(vst.mean == doctest::Approx(css / 78.0).epsilon(0.02));
    const SampleStats mst = coord_stats(draws.draws, 0);
    CHECK(mst.mean == doctest::Approx(mean).epsilon(0.05));
}

TEST_CASE("poly conjugate draws center on the least-squares solution") {
    const auto& poly = family_registry("poly");
    RngStream s(77);
    const Dataset data = poly.sample(param(poly, {0.5, -1.0, 0.3}), 300, s);
    const MleResult fit = poly.mle(data, 3);
    const PosteriorDraws draws =
        posterior_sample(poly, flat_prior(poly, 3, 0.0), data, 20000, RngStream(7));
    for (std::size_t c = 0; c < 3; ++c) {
        const SampleStats st = coord_stats(draws.draws, c);
        CHECK(std::abs(st.mean - fit.value.values[c]) < 5.0 * st.sd / std::sqrt(20000.0));
    }
}

TEST_CASE("domain truncation is honored by rejection") {
    const ModelFamily& gauss = family_registry("gauss_mean");
    RngStream s(61);
    const Dataset data = gauss.sample(param(gauss, {0.0}), 5, s);
    auto [proper, mass] = normalize(flat_prior(gauss, 1, 0.0), TruncationDomain{{{-0.25, 0.25}}});
    (void)mass;
    const PosteriorDraws draws = posterior_sample(gauss, proper, data, 2000, RngStream(9));
    for (const Parameterization& d : draws.draws) {
        REQUIRE(d.values[0] >= -0.25);
        REQUIRE(d.values[0] <= 0.25);
    }
}

TEST_CASE("random-walk sampler matches the conjugate answer") {
    const ModelFamily& gauss = family_registry("gauss_mean");
    RngStream s(417);
    const Dataset data = gauss.sample(param(gauss, {-0.8}), 50, s);
    const Prior flat = flat_prior(gauss, 1, 0.0);
    const Prior opaque = opaque_flat(gauss, 1);

    const PosteriorDraws exact = posterior_sample(gauss, flat, data, 30000, RngStream(10));
    const PosteriorDraws walk = posterior_sample(gauss, opaque, data, 30000, RngStream(11));
    REQUIRE(walk.mcmc.has_value());
    CHECK(walk.mcmc->accept_rate > 0.1);
    CHECK(walk.mcmc->accept_rate < 0.9);
    CHECK(walk.mcmc->split_rhat < 1.05);
    CHECK_FALSE(walk.mcmc->quality_warning);

    const SampleStats ex = coord_stats(exact.draws, 0);
    const SampleStats wk = coord_stats(walk.draws, 0);
    // generous band: the walk has autocorrelation, so give it ~10x the naive SE
    CHECK(std::abs(wk.mean - ex.mean) < 10.0 * ex.sd / std::sqrt(30000.0));
    CHECK(wk.sd == doctest::Approx(ex.sd).epsilon(0.1));
}

TEST_CASE("a frozen chain trips the quality warning") {
    const ModelFamily& gauss = family_registry("gauss_mean");
    RngStream s(3001);
    const Dataset data = gauss.sample(param(gauss, {0.0}), 1, s);
    // prior a thousand times narrower than the likelihood: the step size
    // derived from the likelihood curvature is hopeless and the chain freezes
    Prior narrow = flat_prior(gauss, 1, 0.0);
    narrow.kind = PriorKind::Custom;
    narrow.custom_log_density = [](const Parameterization& theta) {
        return normal_log_pdf(theta.values[0], 0.0, 1e-8);
    };
    const PosteriorDraws walk = posterior_sample(gauss, narrow, data, 2000, RngStream(12));
    REQUIRE(walk.mcmc.has_value());
    CHECK(walk.mcmc->accept_rate < 0.01);
    CHECK(walk.mcmc->quality_warning);
}
