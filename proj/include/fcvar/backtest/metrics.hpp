#pragma once

#include <cstdint>
#include <vector>

namespace fcvar::backtest {

/// Lower/upper empirical CVaR on returns. Equal-mass convention: each tail has
/// probability mass 1-beta, with the boundary observation fractionally
/// weighted. tail_empty flags samples too small for a full tail observation
/// (n*(1-beta) < 1); the formula value (the extreme observation) is still
/// returned.
struct TailPair {
    double lower = 0.0;
    double upper = 0.0;
    bool tail_empty = false;
};

TailPair cvar_empirical(const std::vector<double>& sample, double beta);

/// Maximum peak-to-trough decline of a positive value series, in percent.
double max_drawdown(const std::vector<double>& values);

/// Reward-to-risk ratios of a daily return series. Ratios are raw
/// (dimensionless); the report layer scales by 100. A ratio whose denominator
/// is zero or non-finite is flagged undefined and set to NaN.
struct RrRatios {
    double ir = 0.0;       // mean / std
    double sortino = 0.0;  // mean / sqrt(mean squared negative part)
    double starr = 0.0;    // mean / |lower CVaR|
    double rachev = 0.0;   // upper CVaR / |lower CVaR|
    double gini = 0.0;     // mean / Gini mean difference
    bool ir_defined = false;
    bool sortino_defined = false;
    bool starr_defined = false;
    bool rachev_defined = false;
    bool gini_defined = false;
};

RrRatios rr_ratios(const std::vector<double>& returns, double beta_rachev = 0.95);

/// Gini mean difference, 2/(n(n-1)) * sum_{i<j} |x_i - x_j|.
double gini_mean_difference(const std::vector<double>& sample);

}  // namespace fcvar::backtest
