#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fcvar::factors {

/// B-spline basis on [0,1] with uniformly spaced interior knots and clamped
/// (repeated) boundary knots. `dimension` basis functions form a partition of
/// unity on [0,1].
struct SplineBasis {
    int degree = 3;
    int dimension = 10;  // q
    std::vector<double> knots;  // padded knot vector, size dimension+degree+1

    static SplineBasis cubic(int q);
    static SplineBasis uniform(int q, int degree);
};

/// All q basis values at x via the de Boor recursion; at most degree+1 of them
/// are non-zero. Throws OutOfDomain for x outside [0,1].
Eigen::VectorXd bspline_basis(double x, const SplineBasis& basis);

/// Second-order difference penalty D2'D2 (q x q), the discrete curvature
/// penalty used for P-splines. Its null space is the affine sequences.
Eigen::MatrixXd second_difference_penalty(int q);

}  // namespace fcvar::factors
