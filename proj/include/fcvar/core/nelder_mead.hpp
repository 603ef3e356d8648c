#pragma once

#include <functional>
#include <vector>

namespace fcvar::core {

struct NelderMeadOptions {
    double tol = 1e-8;       // stop when best value improves by less than this over a cycle
    int max_evals = 4000;    // hard budget per call
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int evals = 0;
    bool converged = false;
};

/// Derivative-free simplex minimization of fn over R^n.
/// `steps` gives the initial simplex edge length per coordinate.
/// A cycle is n+1 accepted iterations; convergence is declared when the best
/// objective improves by less than opts.tol over a full cycle.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             std::vector<double> x0, const std::vector<double>& steps,
                             const NelderMeadOptions& opts = {});

}  // namespace fcvar::core
