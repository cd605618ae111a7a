#include "wprior/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace wprior {

namespace {

constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t derive(std::uint64_t key, std::uint64_t id) {
    return mix64(key ^ mix64(id * kWeyl + 0xD1B54A32D192ED03ull));
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed) : key_(mix64(master_seed + kWeyl)) {}

RngStream::RngStream(std::uint64_t key, int) : key_(key) {}

RngStream::RngStream(const StreamSpec& spec) : RngStream(spec.master_seed) {
    for (std::uint64_t id : spec.path) key_ = derive(key_, id);
}

RngStream RngStream::child(std::uint64_t id) const { return RngStream(derive(key_, id), 0); }

std::uint64_t RngStream::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kWeyl);
}

double RngStream::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * f;
    has_cached_normal_ = true;
    return u * f;
}

double RngStream::normal(double mean, double sd) { return mean + sd * normal(); }

double RngStream::exponential(double rate) { return -std::log(uniform()) / rate; }

double RngStream::gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0) throw std::invalid_argument("gamma: shape and rate must be positive");
    if (shape < 1.0) {
        // Boost by one and correct with a power of a uniform.
        const double g = gamma(shape + 1.0, 1.0);
        return g * std::pow(uniform(), 1.0 / shape) / rate;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double RngStream::beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    // Rejection to avoid modulo bias.
    const std::uint64_t limit = n * (~0ull / n);
    std::uint64_t u;
    do {
        u = next_u64();
    } while (u >= limit);
    return u % n;
}

}  // namespace wprior
