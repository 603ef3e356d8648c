#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fcvar/data/panels.hpp"
#include "fcvar/factors/factor_model.hpp"
#include "fcvar/ts/arma_garch.hpp"

namespace fcvar::backtest {

struct BacktestConfig {
    int window = 765;           // T_w
    int scenarios = 10000;      // S
    double beta = 0.99;
    std::vector<double> alphas = {0.5};
    double cost_rate = 0.0002;  // per transaction leg
    std::optional<double> turnover_cap = 0.05;
    factors::FactorModelKind factor_model = factors::FactorModelKind::none;
    std::uint64_t seed = 0;
    bool collect_diagnostics = false;
    ts::FitOptions fit_options;
    factors::FactorOptions factor_options;
};

struct LedgerRow {
    std::string date;
    Eigen::VectorXd weights_before;  // previously chosen target
    Eigen::VectorXd weights_after;   // target traded into on this row's date
    double gross = 0.0;              // portfolio simple return of the day
    double cost = 0.0;               // transaction cost charged this day
    double net = 0.0;                // (value[t] - value[t-1]) / value[t-1]
    double value = 0.0;              // value[t] = value[t-1]*(1+gross) - cost
    double turnover = 0.0;           // sum |after - before|
};

struct BacktestLedger {
    double initial_value = 1.0;
    std::vector<LedgerRow> rows;
};

struct FactorDiagRow {
    std::string date;
    std::string ticker;
    std::string model;
    double adj_r2 = 0.0;
    double mae = 0.0;
    double bic = 0.0;
    std::string pvalue_flags;  // one '0'/'1' per factor
};

/// Per-date byproducts used by the Figure-style reports: the last
/// standardized innovation and the last regression residual of each asset,
/// and the factor-model diagnostics.
struct DiagnosticsLog {
    std::vector<std::string> dates;
    Eigen::MatrixXd innovations;  // dates x assets
    Eigen::MatrixXd residuals;    // dates x assets
    std::vector<FactorDiagRow> factor_diags;
};

struct BacktestResult {
    BacktestLedger ledger;
    DiagnosticsLog diagnostics;
};

/// Full daily pipeline for one risk-aversion alpha: rolling window ->
/// BIC-selected ARMA-GARCH per asset -> factor regression on the innovations
/// -> NIG fit on the residual panel -> S simulated one-step returns ->
/// mean-CVaR weights under the turnover cap -> costed ledger row.
/// Deterministic for a fixed config and seed. A failure on any date aborts
/// with the date identified (BacktestError).
BacktestResult run_backtest(const data::ReturnPanel& returns,
                            const std::vector<data::FactorPanel>& factor_panels,
                            const BacktestConfig& cfg, double alpha);

/// Price-panel convenience overload (computes log returns first).
BacktestResult run_backtest(const data::PricePanel& prices,
                            const std::vector<data::FactorPanel>& factor_panels,
                            const BacktestConfig& cfg, double alpha);

/// Equal-weight buy-and-hold: 1/I dollars per asset at inception, entry cost
/// once, positions drift with returns and are never rebalanced.
BacktestLedger ewbh_benchmark(const data::ReturnPanel& returns, double cost_rate,
                              int first_row = 0);

/// cost = value * cost_rate * sum |new - prev|; returns (cost, value - cost).
std::pair<double, double> apply_costs(const Eigen::VectorXd& prev_weights,
                                      const Eigen::VectorXd& new_weights, double value,
                                      double cost_rate);

/// Scenario generation for a single anchor (the per-date core of the
/// backtest, exposed for the CLI `simulate` subcommand). Returns simple
/// returns, S x I.
struct SimulationArtifacts {
    Eigen::MatrixXd scenarios;                   // S x I simple returns
    std::vector<ts::ArmaGarchFit> fits;          // per asset
    std::vector<factors::FactorFit> factor_fits; // per asset
    Eigen::MatrixXd residual_panel;              // T_w x I
    std::string nig_record;                      // fitted NIG parameter record
};

SimulationArtifacts simulate_scenarios(const data::ReturnPanel& returns,
                                       const std::vector<data::FactorPanel>& factor_panels,
                                       const BacktestConfig& cfg, int anchor,
                                       std::uint64_t date_seed);

}  // namespace fcvar::backtest
