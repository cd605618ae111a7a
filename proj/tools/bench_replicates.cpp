// Benchmark of the replicate-parallel Monte Carlo core: the same estimator
// workload run serially and with the OpenMP pool, checking that the keyed
// reduction makes the results bit-identical before reporting throughput.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "wprior/estimators.hpp"
#include "wprior/families.hpp"
#include "wprior/prior.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace wprior;

namespace {

double time_run(const char* label, int workers, std::size_t n_outer, double* out_value) {
    const ModelFamily& family = family_registry("gauss_mean");
    const Parameterization theta0{"gauss_mean", {0.7}};
    const std::size_t n_obs = 100;
    const Prior prior = w_prior_regular(family, 1, static_cast<double>(n_obs));
    Budgets budgets;
    budgets.n_outer = n_outer;
    budgets.n_inner = 256;

    set_parallel_workers(workers);
    const auto t0 = std::chrono::steady_clock::now();
    const MultiplicityResult r =
        multiplicity_direct(family, theta0, prior, n_obs, budgets, RngStream(20260809));
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    std::printf("%-10s workers=%d  log_m=%.12f  se=%.6f  %8.1f ms\n", label, workers,
                r.log_m.mean, r.log_m.std_error, ms);
    *out_value = r.log_m.mean;
    return ms;
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n_outer = 4096;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--quick") == 0) n_outer = 512;

    int pool = 1;
#ifdef _OPENMP
    pool = omp_get_max_threads();
#endif
    double serial_value = 0.0, parallel_value = 0.0;
    const double serial_ms = time_run("serial", 1, n_outer, &serial_value);
    const double parallel_ms = time_run("parallel", pool, n_outer, &parallel_value);
    set_parallel_workers(0);

    if (serial_value != parallel_value) {
        std::printf("FAIL: serial and parallel reductions differ\n");
        return 1;
    }
    std::printf("bit-identical results; speedup x%.2f over %d worker(s)\n",
                serial_ms / parallel_ms, pool);
    return 0;
}
