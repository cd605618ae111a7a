#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "wprior/math.hpp"
#include "wprior/mc.hpp"
#include "wprior/rng.hpp"

using namespace wprior;

TEST_CASE("uniform draws stay inside the open unit interval") {
    RngStream s(1);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("distribution moments are sane") {
    RngStream s(7);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        sum += x;
        sum_sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.02));

    double gsum = 0.0;
    for (int i = 0; i < n; ++i) gsum += s.gamma(3.5, 2.0);
    CHECK(gsum / n == doctest::Approx(1.75).epsilon(0.02));

    double bsum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double b = s.beta(0.5, 0.5);
        REQUIRE(b > 0.0);
        REQUIRE(b < 1.0);
        bsum += b;
    }
    CHECK(bsum / n == doctest::Approx(0.5).epsilon(0.02));

    double esum = 0.0;
    for (int i = 0; i < n; ++i) esum += s.exponential(4.0);
    CHECK(esum / n == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("same stream spec reproduces the same sequence, children differ") {
    const StreamSpec spec{42, {3, 1, 4}};
    RngStream a(spec), b(spec);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

    RngStream base(42);
    RngStream c1 = base.child(1), c2 = base.child(2);
    int agree = 0;
    for (int i = 0; i < 1000; ++i) agree += (c1.next_u64() == c2.next_u64());
    CHECK(agree == 0);

    // child derivation ignores how much of the parent was consumed
    RngStream fresh(42);
    RngStream before = fresh.child(9);
    fresh.uniform();
    fresh.uniform();
    RngStream after = fresh.child(9);
    CHECK(before.next_u64() == after.next_u64());
}

TEST_CASE("distinct streams are empirically uncorrelated") {
    RngStream base(20260809);
    RngStream a = base.child(100), b = base.child(200);
    const int n = 10000;
    double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = a.uniform(), y = b.uniform();
        sx += x; sy += y; sxy += x * y; sxx += x * x; syy += y * y;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double vx = sxx / n - (sx / n) * (sx / n);
    const double vy = syy / n - (sy / n) * (sy / n);
    CHECK(std::abs(cov / std::sqrt(vx * vy)) < 0.05);
}

TEST_CASE("mc_mean: constant sampler") {
    const Estimate e = mc_mean([](RngStream&) { return 3.0; }, 100, RngStream(5));
    CHECK(e.mean == 3.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.n == 100);
}

TEST_CASE("mc_mean: unit normal within the central-limit band") {
    const std::size_t n = 10000;
    const Estimate e = mc_mean([](RngStream& s) { return s.normal(); }, n, RngStream(11));
    CHECK(std::abs(e.mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(e.std_error == doctest::Approx(1.0 / std::sqrt(static_cast<double>(n))).epsilon(0.1));
}

TEST_CASE("mc_mean: two runs with the same stream are bitwise identical") {
    const auto sampler = [](RngStream& s) { return s.normal() + s.uniform(); };
    const Estimate a = mc_mean(sampler, 5000, RngStream(77));
    const Estimate b = mc_mean(sampler, 5000, RngStream(77));
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.seed == b.seed);
}

TEST_CASE("mc_mean: non-finite samples are excluded, too many fail") {
    const auto mostly_ok = [](RngStream& s) {
        return s.uniform() < 0.005 ? std::numeric_limits<double>::infinity() : 1.0;
    };
    const Estimate e = mc_mean(mostly_ok, 20000, RngStream(13));
    CHECK(e.mean == 1.0);
    CHECK(e.n_excluded > 0);
    CHECK(e.n + e.n_excluded == 20000);

    const auto mostly_bad = [](RngStream& s) {
        return s.uniform() < 0.2 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
    };
    CHECK_THROWS_AS(mc_mean(mostly_bad, 20000, RngStream(13)), McFailure);
}

TEST_CASE("parallel and serial runs give bit-identical sample sets") {
    const auto sampler = [](RngStream& s) {
        double acc = 0.0;
        for (int i = 0; i < 10; ++i) acc += s.normal();
        return acc;
    };
    set_parallel_workers(1);
    const std::vector<double> serial = mc_collect(sampler, 2000, RngStream(99));
    set_parallel_workers(4);
    const std::vector<double> parallel = mc_collect(sampler, 2000, RngStream(99));
    set_parallel_workers(0);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) REQUIRE(serial[i] == parallel[i]);
}

TEST_CASE("nested_mc: constant inner value reduces to the outer mean") {
    // inner closure returns the value drawn by the outer sampler
    const InnerSampler outer = [](RngStream& s) {
        const double v = s.normal();
        return Sampler([v](RngStream&) { return v; });
    };
    const Estimate nested = nested_mc(outer, 500, 8, RngStream(123));
    std::vector<double> expect;
    for (std::size_t i = 0; i < 500; ++i) {
        RngStream s = RngStream(123).child(i).child(0);
        expect.push_back(s.normal());
    }
    const SampleStats st = sample_stats(expect);
    CHECK(nested.mean == doctest::Approx(st.mean).epsilon(1e-12));
}

TEST_CASE("nested_mc: outer constant, inner noise averages out") {
    const std::size_t n_outer = 256, n_inner = 64;
    const InnerSampler outer = [](RngStream&) {
        return Sampler([](RngStream& s) { return s.normal(); });
    };
    const Estimate e = nested_mc(outer, n_outer, n_inner, RngStream(321));
    const double ideal = 1.0 / std::sqrt(static_cast<double>(n_outer * n_inner));
    CHECK(std::abs(e.mean) < 4.0 * ideal);
    CHECK(e.std_error > 0.5 * ideal);
    CHECK(e.std_error < 2.0 * ideal);

    const Estimate again = nested_mc(outer, n_outer, n_inner, RngStream(321));
    CHECK(e.mean == again.mean);
    CHECK(e.std_error == again.std_error);
}

TEST_CASE("log_sum_exp handles extremes") {
    CHECK(log_sum_exp(std::vector<double>{}) == -std::numeric_limits<double>::infinity());
    const std::vector<double> big{1000.0, 1000.0};
    CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_add_exp(-std::numeric_limits<double>::infinity(), 3.0) == 3.0);
}

TEST_CASE("gauss_legendre integrates polynomials and gaussians") {
    const QuadRule& rule = gauss_legendre(16);
    double cubic = 0.0, gauss = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = 0.5 + 0.5 * rule.nodes[i];  // map to [0,1]
        cubic += 0.5 * rule.weights[i] * x * x * x;
    }
    CHECK(cubic == doctest::Approx(0.25).epsilon(1e-12));
    const QuadRule& wide = gauss_legendre(128);
    for (std::size_t i = 0; i < wide.nodes.size(); ++i) {
        const double x = 8.0 * wide.nodes[i];
        gauss += 8.0 * wide.weights[i] * std::exp(normal_log_pdf(x, 0.0, 1.0));
    }
    CHECK(gauss == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("finite-difference weights differentiate exactly on polynomials") {
    const std::vector<double> nodes{0.009, 0.0095, 0.01, 0.0105, 0.011};
    const std::vector<double> w = fd_weights(0.01, nodes, 1);
    double d_const = 0.0, d_linear = 0.0, d_square = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        d_const += w[i];
        d_linear += w[i] * nodes[i];
        d_square += w[i] * nodes[i] * nodes[i];
    }
    CHECK(std::abs(d_const) < 1e-9);
    CHECK(d_linear == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d_square == doctest::Approx(0.02).epsilon(1e-9));
}
