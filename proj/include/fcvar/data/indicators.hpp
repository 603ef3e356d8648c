#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fcvar/data/panels.hpp"

namespace fcvar::data {

/// Log returns from consecutive close prices: r[t] = ln(p[t+1]/p[t]).
/// Throws NonPositivePrice / InsufficientRows.
ReturnPanel compute_log_returns(const PricePanel& prices);

/// Relative strength index over a trailing n-day window, values in [0,100].
/// Entry t (for t >= n) uses the n day-on-day changes ending at t.
/// AvgDown == 0 maps to 100, AvgUp == 0 maps to 0. Output has size()-n entries.
std::vector<double> compute_rsi(const std::vector<double>& prices, int n);

/// Average true range: TR[t] = max(high-low, |high-prev_close|, |low-prev_close|),
/// ATR = simple n-day moving average of TR. TR[0] = high[0]-low[0].
/// Output aligned with the input tail (size()-n+1 entries).
std::vector<double> compute_atr(const std::vector<double>& highs, const std::vector<double>& lows,
                                const std::vector<double>& closes, int n = 14);

/// Min-max normalization of each factor column to [0,1] using the panel's own
/// rows (callers hand in window slices, so bounds are window-local).
/// Constant columns map to 0.5. Bounds are recorded on the result.
FactorPanel normalize_factors(const FactorPanel& panel);

/// Maps a raw factor row through previously recorded bounds. A zero-width
/// bound maps to 0.5. No clamping here; GAM prediction clamps on its own.
Eigen::VectorXd apply_bounds(const Eigen::VectorXd& raw_row,
                             const std::vector<std::pair<double, double>>& bounds);

struct AssetStats {
    double mean = 0, median = 0, stddev = 0, skewness = 0, ex_kurtosis = 0;
    double cvar_lower = 0, cvar_upper = 0;
};

/// Per-asset sample moments plus lower/upper empirical CVaR at level beta.
std::vector<AssetStats> panel_stats(const ReturnPanel& returns, double beta);

/// Slice the training window for anchor index t (an index into the return
/// panel's rows). Requires t >= T_w; factor slices additionally require
/// t >= T_w + 1 because of the one-day lag. Pass with_factors=false to build
/// a returns-only window.
RollingWindow make_window(const ReturnPanel& returns, const std::vector<FactorPanel>& factors,
                          int t, int window, bool with_factors = true);

}  // namespace fcvar::data
