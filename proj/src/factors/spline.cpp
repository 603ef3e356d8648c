#include "fcvar/factors/spline.hpp"

#include <algorithm>

#include "fcvar/core/errors.hpp"

namespace fcvar::factors {

SplineBasis SplineBasis::uniform(int q, int degree) {
    if (degree < 0 || q < degree + 1) {
        throw InvalidParameter("SplineBasis: need dimension >= degree + 1");
    }
    SplineBasis b;
    b.degree = degree;
    b.dimension = q;
    // equally spaced knots extended `degree` steps beyond [0,1]: the classic
    // P-spline grid, on which affine coefficient sequences reproduce affine
    // functions of x (the null space of the difference penalty)
    const int segments = q - degree;
    const double h = 1.0 / segments;
    b.knots.resize(q + degree + 1);
    for (int i = 0; i <= q + degree; ++i) {
        b.knots[i] = (static_cast<double>(i) - degree) * h;
    }
    return b;
}

SplineBasis SplineBasis::cubic(int q) { return uniform(q, 3); }

Eigen::VectorXd bspline_basis(double x, const SplineBasis& basis) {
    if (!(x >= 0.0 && x <= 1.0)) throw OutOfDomain("bspline_basis: x must lie in [0,1]");
    const int deg = basis.degree;
    const int q = basis.dimension;
    const auto& t = basis.knots;

    // knot span index i with t[i] <= x < t[i+1]; x = 1 falls in the last span
    int span = deg;
    const int last = q - 1;
    while (span < last && x >= t[span + 1]) ++span;

    // de Boor (Cox) triangular recursion for the deg+1 non-zero functions
    std::vector<double> vals(deg + 1, 0.0), left(deg + 1), right(deg + 1);
    vals[0] = 1.0;
    for (int j = 1; j <= deg; ++j) {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double tmp = denom != 0.0 ? vals[r] / denom : 0.0;
            vals[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        vals[j] = saved;
    }

    Eigen::VectorXd out = Eigen::VectorXd::Zero(q);
    for (int r = 0; r <= deg; ++r) {
        const int idx = span - deg + r;
        if (idx >= 0 && idx < q) out[idx] = vals[r];
    }
    return out;
}

Eigen::MatrixXd second_difference_penalty(int q) {
    if (q < 3) return Eigen::MatrixXd::Zero(q, q);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(q - 2, q);
    for (int i = 0; i < q - 2; ++i) {
        D(i, i) = 1.0;
        D(i, i + 1) = -2.0;
        D(i, i + 2) = 1.0;
    }
    return D.transpose() * D;
}

}  // namespace fcvar::factors
