#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "wprior/estimate.hpp"
#include "wprior/rng.hpp"

namespace wprior {

/// Raised when more than the tolerated fraction of Monte Carlo samples is
/// non-finite.
class McFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sets the worker count used by parallel_for (0 restores the OpenMP
/// default). Results never depend on this value: work item i always uses
/// the stream derived for index i and reduction is over the index-keyed
/// result vector.
void set_parallel_workers(int n);
int parallel_workers();

/// Runs body(i) for i in [0, n), possibly across OpenMP threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

using Sampler = std::function<double(RngStream&)>;

/// Sample mean with standard error. Draw i consumes stream.child(i), so the
/// result is bitwise identical however the loop is scheduled. Non-finite
/// draws are excluded (counted in the result); more than 1% of them is an
/// McFailure.
Estimate mc_mean(const Sampler& sampler, std::size_t n, const RngStream& stream);

/// Collects values[i] = sampler(stream.child(i)) without reduction.
std::vector<double> mc_collect(const Sampler& sampler, std::size_t n, const RngStream& stream);

/// Reduces an index-keyed value vector to an Estimate (mean, sd/sqrt(n)).
Estimate reduce_samples(const std::vector<double>& values, const RngStream& stream,
                        double max_nonfinite_fraction = 0.01);

using InnerSampler = std::function<Sampler(RngStream&)>;

/// Outer mean of inner means. Outer draw i receives stream.child(i).child(0);
/// its inner draw j receives stream.child(i).child(1 + j). The reported
/// standard error is the spread of the inner means, which already includes
/// the inner-noise contribution.
Estimate nested_mc(const InnerSampler& outer, std::size_t n_outer, std::size_t n_inner,
                   const RngStream& stream);

}  // namespace wprior
