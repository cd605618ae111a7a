#pragma once

#include <cstdint>
#include <vector>

namespace wprior {

/// Identifies one random stream: a master seed plus an integer path
/// (experiment / replicate / purpose). Distinct paths give independent
/// streams; the same (seed, path) always reproduces the same sequence.
struct StreamSpec {
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> path;
};

/// Counter-based random stream. The generator state is a 64-bit key derived
/// by hashing the stream path, advanced by a Weyl increment and finalized
/// with a strong 64-bit mixer (splitmix64). Any substream can therefore be
/// reconstructed in isolation without generating its siblings.
class RngStream {
public:
    explicit RngStream(std::uint64_t master_seed);
    explicit RngStream(const StreamSpec& spec);

    /// Derives the child stream with the given id. Independent of how much
    /// of this stream has been consumed.
    RngStream child(std::uint64_t id) const;

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1).
    double uniform();
    double uniform(double lo, double hi);
    /// Standard normal (Marsaglia polar, one value cached).
    double normal();
    double normal(double mean, double sd);
    double exponential(double rate);
    /// Gamma with shape/rate parameterization (Marsaglia-Tsang).
    double gamma(double shape, double rate);
    double beta(double a, double b);
    bool bernoulli(double p);
    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);

    /// Key identifying this stream; recorded as seed provenance in results.
    std::uint64_t key() const { return key_; }

private:
    RngStream(std::uint64_t key, int);  // from raw key

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace wprior
