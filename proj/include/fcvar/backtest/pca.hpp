#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fcvar::backtest {

struct PcaDynamics {
    int k_fixed = 0;  // components covering >= 90% of the first returns window
    std::vector<double> returns_share;      // per window anchor
    std::vector<double> innovations_share;
    std::vector<double> residuals_share;
};

/// Rolling explained-variance dynamics. k_fixed is the smallest component
/// count whose eigenvalue share reaches `target` on the first returns window;
/// every subsequent window reports the top-k_fixed share of each panel's
/// covariance. Panels are date x asset with a shared date axis; anchors run
/// from `window` to the row count, stepped by `stride`.
PcaDynamics pca_explained_dynamics(const Eigen::MatrixXd& returns,
                                   const Eigen::MatrixXd& innovations,
                                   const Eigen::MatrixXd& residuals, int window, int stride = 1,
                                   double target = 0.9);

/// Share of total variance carried by the top k eigenvalues of the sample
/// covariance of `panel` (rows = observations).
double top_k_share(const Eigen::MatrixXd& panel, int k);

}  // namespace fcvar::backtest
