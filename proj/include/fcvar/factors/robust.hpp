#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace fcvar::factors {

enum class RobustLoss { huber, tukey };

struct RobustConfig {
    RobustLoss loss = RobustLoss::tukey;
    double kappa = 4.685;  // in robust-scale units; 1.345 for huber
    int max_iter = 50;
    double tol = 1e-8;  // max coefficient change

    static RobustConfig huber() { return {RobustLoss::huber, 1.345, 50, 1e-8}; }
    static RobustConfig tukey() { return {RobustLoss::tukey, 4.685, 50, 1e-8}; }
};

struct LossValue {
    double rho;
    double psi;
    double weight;  // psi(x)/x with weight(0) = 1
};

/// Loss, influence and IRLS weight at a scaled residual x.
LossValue robust_loss(double x, const RobustConfig& cfg);

/// Median absolute deviation about the median, scaled by 1/0.6745 so that it
/// is consistent for the normal standard deviation.
double mad_scale(const Eigen::VectorXd& residuals);

struct RobustFit {
    double intercept = 0.0;
    Eigen::VectorXd coefs;       // length K
    Eigen::VectorXd weights;     // length n, in [0,1]
    double scale = 0.0;          // robust residual scale at convergence
    Eigen::VectorXd residuals;   // length n
    int iterations = 0;
    bool zero_scale = false;     // stopped on an exact fit
    // per-iteration objective sum(rho(resid/scale)) before and after the
    // weighted solve, both at that iteration's scale
    std::vector<std::pair<double, double>> objective_trace;
    std::vector<bool> significant;  // per-factor |t| > 1.96 flag
};

/// Iteratively reweighted least squares M-estimation of h on [1, F].
/// OLS start; scale and weights recomputed every iteration; stops when the
/// largest coefficient change drops below cfg.tol.
/// Throws SingularDesign when the (weighted) Gram matrix is rank deficient.
RobustFit fit_rlr(const Eigen::VectorXd& h, const Eigen::MatrixXd& F, const RobustConfig& cfg);

/// Conditional mean at one factor row.
double predict_rlr(const RobustFit& fit, const Eigen::VectorXd& f_row);

}  // namespace fcvar::factors
