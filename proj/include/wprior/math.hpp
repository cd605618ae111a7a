#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wprior {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogTwoPi = 1.8378770664093454836;

/// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

/// log(sum_i exp(v_i)); returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

/// log Beta(a, b).
inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double normal_log_pdf(double x, double mean, double variance) {
    const double d = x - mean;
    return -0.5 * (kLogTwoPi + std::log(variance)) - d * d / (2.0 * variance);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct SampleStats {
    double mean = 0.0;
    double sd = 0.0;       // sample standard deviation (n-1 denominator)
    std::size_t n = 0;
};

SampleStats sample_stats(std::span<const double> values);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
/// Results are cached per n; thread-safe after first use of a given n
/// (callers in this project request all rules up front on one thread).
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const QuadRule& gauss_legendre(int n);

/// Finite-difference weights for the m-th derivative at z from arbitrary
/// distinct nodes (Fornberg's recursion).
std::vector<double> fd_weights(double z, std::span<const double> nodes, int order);

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

}  // namespace wprior
