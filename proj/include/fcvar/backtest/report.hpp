#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fcvar/backtest/engine.hpp"
#include "fcvar/backtest/metrics.hpp"
#include "fcvar/backtest/pca.hpp"

namespace fcvar::backtest {

/// The full metric set of the summary tables. Percent-scaled where the
/// reports print percent: total/annualized return, AvgT, CVaRs, MD and the
/// reward-to-risk ratios are x100; mean/median/std/skew/kurtosis/semidev stay
/// raw daily.
struct MetricsReport {
    double total_return_pct = 0.0;
    double annualized_return_pct = 0.0;
    double avg_turnover_pct = 0.0;  // mean turnover from the second row on
    double cvar_lower_95_pct = 0.0;
    double cvar_upper_95_pct = 0.0;
    double cvar_lower_99_pct = 0.0;
    double cvar_upper_99_pct = 0.0;
    double max_drawdown_pct = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
    double skewness = 0.0;
    double ex_kurtosis = 0.0;
    double semi_deviation = 0.0;
    double ir = 0.0, sortino = 0.0, starr = 0.0, rachev = 0.0, gini = 0.0;  // x100
    bool ratios_defined[5] = {false, false, false, false, false};
};

MetricsReport compute_metrics(const BacktestLedger& ledger);

/// CSV emitters for the report subcommand (one row per strategy; wide
/// value-path table; one diagnostics row per date/asset; PCA dynamics).
std::string metrics_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows);
std::string value_path_csv(const std::vector<std::pair<std::string, BacktestLedger>>& ledgers);
std::string ledger_csv(const BacktestLedger& ledger, const std::vector<std::string>& tickers);
std::string diagnostics_csv(const std::vector<FactorDiagRow>& rows);
std::string pca_csv(const PcaDynamics& dyn, const std::vector<std::string>& anchor_dates);

/// Parses a ledger written by ledger_csv (used by the report subcommand).
BacktestLedger ledger_from_csv(const std::string& path);

}  // namespace fcvar::backtest
