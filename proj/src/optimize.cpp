#include "wprior/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wprior {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    struct Vertex {
        std::vector<double> x;
        double f;
    };
    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back({x0, f(x0)});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x = x0;
        x[i] += options.initial_step * (1.0 + std::abs(x[i]));
        simplex.push_back({x, f(x)});
    }
    auto by_f = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };

    NelderMeadResult result;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        std::sort(simplex.begin(), simplex.end(), by_f);
        result.iterations = iter;

        double spread_x = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            spread_x = std::max(spread_x, std::abs(simplex.back().x[i] - simplex.front().x[i]));
        const double spread_f = simplex.back().f - simplex.front().f;
        if (spread_x < options.x_tolerance || (std::isfinite(spread_f) && spread_f < options.f_tolerance)) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i] / static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (simplex.back().x[i] - centroid[i]);
            return x;
        };
        const std::vector<double> xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < simplex.front().f) {
            const std::vector<double> xe = blend(-2.0);
            const double fe = f(xe);
            simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < simplex[n - 1].f) {
            simplex.back() = {xr, fr};
        } else {
            const std::vector<double> xc = blend(0.5);
            const double fc = f(xc);
            if (fc < simplex.back().f) {
                simplex.back() = {xc, fc};
            } else {
                for (std::size_t v = 1; v <= n; ++v) {
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                    simplex[v].f = f(simplex[v].x);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_f);
    result.x = simplex.front().x;
    result.f = simplex.front().f;
    return result;
}

MleResult multistart_mle(const ModelFamily& family, const Dataset& data, int k) {
    const auto objective = [&](const std::vector<double>& x) {
        Parameterization theta{family.id(), x};
        if (!family.in_domain(theta)) return kInf;
        const double ll = family.log_likelihood(theta, data);
        return std::isfinite(ll) ? -ll : kInf;
    };

    const Parameterization guess = family.initial_guess(data, k);
    RngStream stream(0x0A11E5EEDull);  // fixed internal seed, deterministic output
    constexpr int kStarts = 8;

    bool any_converged = false;
    bool have_best = false;
    std::vector<double> best_x;
    double best_f = kInf;
    for (int s = 0; s < kStarts; ++s) {
        std::vector<double> x0 = guess.values;
        if (s > 0)
            for (double& v : x0) v += stream.normal(0.0, 0.25 * (1.0 + std::abs(v)));
        if (!family.in_domain(Parameterization{family.id(), x0})) continue;
        const NelderMeadResult r = nelder_mead(objective, x0);
        if (!std::isfinite(r.f)) continue;
        any_converged = any_converged || r.converged;
        const Parameterization cand{family.id(), r.x};
        const Parameterization incumbent{family.id(), best_x};
        const bool better = !have_best || r.f < best_f - 1e-10 ||
                            (std::abs(r.f - best_f) <= 1e-10 && cand.norm() < incumbent.norm());
        if (better) {
            best_f = r.f;
            best_x = r.x;
            have_best = true;
        }
    }
    if (!have_best)
        throw ConvergenceError("mle: all multistarts failed for family " + family.id(), guess);
    MleResult result;
    result.value = Parameterization{family.id(), best_x};
    result.log_likelihood = -best_f;
    if (!any_converged)
        throw ConvergenceError("mle: optimizer did not converge within the multistart budget",
                               result.value);
    return result;
}

}  // namespace wprior
