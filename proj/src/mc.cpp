#include "wprior/mc.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wprior/math.hpp"

namespace wprior {

namespace {
std::atomic<int> g_workers{0};
}

void set_parallel_workers(int n) { g_workers.store(n < 0 ? 0 : n); }

int parallel_workers() { return g_workers.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
#ifdef _OPENMP
    const int requested = g_workers.load();
    if (requested == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const int threads = requested > 0 ? requested : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) body(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

std::vector<double> mc_collect(const Sampler& sampler, std::size_t n, const RngStream& stream) {
    std::vector<double> values(n);
    parallel_for(n, [&](std::size_t i) {
        RngStream s = stream.child(i);
        values[i] = sampler(s);
    });
    return values;
}

Estimate reduce_samples(const std::vector<double>& values, const RngStream& stream,
                        double max_nonfinite_fraction) {
    std::vector<double> finite;
    finite.reserve(values.size());
    for (double v : values)
        if (std::isfinite(v)) finite.push_back(v);
    const std::size_t excluded = values.size() - finite.size();
    if (static_cast<double>(excluded) > max_nonfinite_fraction * static_cast<double>(values.size()))
        throw McFailure("monte carlo failure: " + std::to_string(excluded) + " of " +
                        std::to_string(values.size()) + " samples non-finite");
    const SampleStats st = sample_stats(finite);
    Estimate e;
    e.mean = st.mean;
    e.std_error = st.n >= 2 ? st.sd / std::sqrt(static_cast<double>(st.n)) : 0.0;
    e.n = st.n;
    e.seed = stream.key();
    e.n_excluded = excluded;
    return e;
}

Estimate mc_mean(const Sampler& sampler, std::size_t n, const RngStream& stream) {
    if (n < 2) throw std::invalid_argument("mc_mean: need n >= 2");
    return reduce_samples(mc_collect(sampler, n, stream), stream);
}

Estimate nested_mc(const InnerSampler& outer, std::size_t n_outer, std::size_t n_inner,
                   const RngStream& stream) {
    if (n_outer < 2 || n_inner < 2) throw std::invalid_argument("nested_mc: budgets must be >= 2");
    std::vector<double> outer_means(n_outer);
    std::atomic<std::size_t> excluded{0};
    parallel_for(n_outer, [&](std::size_t i) {
        RngStream si = stream.child(i);
        RngStream s_draw = si.child(0);
        const Sampler inner = outer(s_draw);
        double sum = 0.0;
        std::size_t kept = 0;
        for (std::size_t j = 0; j < n_inner; ++j) {
            RngStream sj = si.child(1 + j);
            const double v = inner(sj);
            if (std::isfinite(v)) {
                sum += v;
                ++kept;
            }
        }
        excluded += n_inner - kept;
        outer_means[i] = kept > 0 ? sum / static_cast<double>(kept)
                                  : std::numeric_limits<double>::quiet_NaN();
    });
    if (static_cast<double>(excluded.load()) > 0.01 * static_cast<double>(n_outer * n_inner))
        throw McFailure("nested_mc: more than 1% of inner samples non-finite");
    Estimate e = reduce_samples(outer_means, stream);
    e.n_excluded += excluded.load();
    return e;
}

}  // namespace wprior
