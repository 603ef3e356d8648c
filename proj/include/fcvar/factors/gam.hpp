#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fcvar/factors/spline.hpp"

namespace fcvar::factors {

struct GamConfig {
    int basis_dim = 10;          // q basis functions per factor, cubic
    std::vector<double> lambdas; // fixed per-factor smoothing; empty = GCV grid
};

/// Additive model h = intercept + sum_k f_k(F_k) + xi, each f_k a P-spline.
/// Every smooth is column-centered over the training inputs, so it sums to
/// zero in sample and the intercept is identified.
struct GamFit {
    SplineBasis basis;
    double intercept = 0.0;
    Eigen::MatrixXd coefs;        // q x K, column k = z_k
    Eigen::MatrixXd col_means;    // q x K centering means of the basis columns
    Eigen::VectorXd lambdas;      // K
    Eigen::VectorXd edf_smooth;   // effective dof per smooth
    double edf_total = 0.0;       // includes the intercept
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    double gcv = 0.0;
    std::vector<bool> significant;  // per-factor approximate Wald flag
};

/// Penalized least squares over the stacked design [1 | B_1 | ... | B_K] with
/// per-factor second-difference penalties. With cfg.lambdas empty, each
/// lambda_k is chosen on a 13-point log grid 1e-4..1e8 by GCV, one
/// coordinate-wise sweep. Inputs must lie in [0,1].
/// Throws DomainViolation / SingularSystem.
GamFit fit_gam(const Eigen::VectorXd& h, const Eigen::MatrixXd& F, const GamConfig& cfg = {});

/// Conditional mean at one factor row; inputs clamped into [0,1].
double predict_gam(const GamFit& fit, const Eigen::VectorXd& f_row);

}  // namespace fcvar::factors
