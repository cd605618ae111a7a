#pragma once

#include <functional>
#include <vector>

#include "wprior/family.hpp"

namespace wprior {

struct NelderMeadOptions {
    int max_iterations = 2000;
    double x_tolerance = 1e-10;
    double f_tolerance = 1e-12;
    double initial_step = 0.5;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Minimizes f by the Nelder-Mead simplex method. f may return +inf to
/// encode constraints.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options = {});

/// Derivative-free maximum-likelihood fit: 8 starts perturbed around the
/// family's moment-matched initial guess, ties between equal-likelihood
/// optima broken by smallest parameter norm. Throws ConvergenceError
/// (carrying the best point found) when no start converges.
MleResult multistart_mle(const ModelFamily& family, const Dataset& data, int k);

}  // namespace wprior
