#pragma once

#include <Eigen/Dense>
#include <optional>

#include "fcvar/cvaropt/simplex.hpp"

namespace fcvar::cvaropt {

/// S x I matrix of simulated one-period simple returns, asset order matching
/// the universe.
struct ScenarioMatrix {
    Eigen::MatrixXd returns;

    Eigen::Index scenarios() const { return returns.rows(); }
    Eigen::Index assets() const { return returns.cols(); }
};

struct OptConfig {
    double alpha = 0.5;                           // reward weight in [0,1]
    double beta = 0.99;                           // CVaR level
    std::optional<Eigen::VectorXd> prev_weights;  // enables the turnover block
    std::optional<double> turnover_cap = 0.05;    // sum |theta - prev| cap
    double lp_tol = 1e-9;
};

struct OptResult {
    Eigen::VectorXd weights;
    double nu = 0.0;         // optimal nu (negative of the VaR level)
    double objective = 0.0;
    double expected_return = 0.0;
    double cvar = 0.0;
    LpStatus status = LpStatus::numerical;
};

/// Mean-CVaR program over equal-probability scenarios:
///   min -alpha mu'theta + (1-alpha) [nu + (S(1-beta))^-1 sum u_s]
///   u_s >= -x_s - nu, u_s >= 0, x_s = scenario return of theta,
///   theta >= 0, sum theta = 1, nu free,
/// plus |theta - prev| turnover slacks capped when prev_weights is set.
LpProblem build_lp(const ScenarioMatrix& scenarios, const OptConfig& cfg);

OptResult optimize_portfolio(const ScenarioMatrix& scenarios, const OptConfig& cfg,
                             LpSolver* solver = nullptr);

/// Exact discrete CVaR of a fixed portfolio: the minimizing nu is an order
/// statistic, so the tail is averaged directly (fractional boundary weight).
double cvar_of_weights(const ScenarioMatrix& scenarios, const Eigen::VectorXd& weights,
                       double beta);

}  // namespace fcvar::cvaropt
