#include "fcvar/backtest/engine.hpp"

#include <cmath>

#include "fcvar/core/errors.hpp"
#include "fcvar/core/parallel.hpp"
#include "fcvar/core/rng.hpp"
#include "fcvar/cvaropt/portfolio.hpp"
#include "fcvar/data/indicators.hpp"
#include "fcvar/nig/em.hpp"

namespace fcvar::backtest {

std::pair<double, double> apply_costs(const Eigen::VectorXd& prev_weights,
                                      const Eigen::VectorXd& new_weights, double value,
                                      double cost_rate) {
    const double turnover = (new_weights - prev_weights).cwiseAbs().sum();
    const double cost = value * cost_rate * turnover;
    return {cost, value - cost};
}

SimulationArtifacts simulate_scenarios(const data::ReturnPanel& returns,
                                       const std::vector<data::FactorPanel>& factor_panels,
                                       const BacktestConfig& cfg, int anchor,
                                       std::uint64_t date_seed) {
    const bool with_factors = cfg.factor_model != factors::FactorModelKind::none;
    if (with_factors && factor_panels.size() != static_cast<std::size_t>(returns.assets())) {
        throw BacktestError("simulate_scenarios: one factor panel per asset is required");
    }
    const data::RollingWindow w =
        data::make_window(returns, factor_panels, anchor, cfg.window, with_factors);
    const int I = static_cast<int>(returns.assets());
    const int T = cfg.window;

    SimulationArtifacts arts;
    arts.fits.resize(I);
    for (int i = 0; i < I; ++i) {
        arts.fits[i] = ts::select_model_bic(w.returns.col(i), cfg.fit_options);
    }

    arts.factor_fits.resize(I);
    arts.residual_panel.resize(T, I);
    Eigen::VectorXd predicted_mean = Eigen::VectorXd::Zero(I);
    if (with_factors) {
        std::vector<Eigen::MatrixXd> normalized(I);
        std::vector<Eigen::VectorXd> pred_rows(I);
        for (int i = 0; i < I; ++i) {
            data::FactorPanel slice;
            slice.values = w.factors[i];
            const data::FactorPanel norm = data::normalize_factors(slice);
            normalized[i] = norm.values;
            // latest observed factor row, normalized with the window's bounds
            pred_rows[i] = data::apply_bounds(
                factor_panels[i].values.row(anchor - 1).transpose(), norm.bounds);
        }
        core::parallel_for(I, [&](std::ptrdiff_t i) {
            arts.factor_fits[i] = factors::fit_factor_model(cfg.factor_model, arts.fits[i].h,
                                                            normalized[i], cfg.factor_options);
        });
        for (int i = 0; i < I; ++i) {
            arts.residual_panel.col(i) = arts.factor_fits[i].residuals;
            predicted_mean[i] = factors::predict(arts.factor_fits[i], pred_rows[i]);
        }
    } else {
        for (int i = 0; i < I; ++i) {
            arts.factor_fits[i].kind = factors::FactorModelKind::none;
            arts.factor_fits[i].residuals = arts.fits[i].h;
            arts.residual_panel.col(i) = arts.fits[i].h;
        }
    }

    nig::EmOptions em_opts;
    const auto [nig_params, trace] = nig::fit_nig_em(arts.residual_panel, em_opts, date_seed);
    arts.nig_record = nig::to_record(nig_params);

    const Eigen::MatrixXd xi = nig::sample_nig(nig_params, cfg.scenarios, date_seed);

    arts.scenarios.resize(cfg.scenarios, I);
    for (int i = 0; i < I; ++i) {
        const double cond_mean = ts::forecast_mean(arts.fits[i]);
        const double sigma = std::sqrt(ts::forecast_sigma2(arts.fits[i]));
        // h_hat = g(F_latest) + xi_sim; r = mean + sigma * h_hat (log return)
        arts.scenarios.col(i) =
            ((cond_mean + sigma * predicted_mean[i]) + (sigma * xi.col(i).array()))
                .exp() - 1.0;
    }
    return arts;
}

namespace {

Eigen::VectorXd simple_returns_row(const data::ReturnPanel& returns, int row) {
    return returns.returns.row(row).array().exp() - 1.0;
}

}  // namespace

BacktestResult run_backtest(const data::ReturnPanel& returns,
                            const std::vector<data::FactorPanel>& factor_panels,
                            const BacktestConfig& cfg, double alpha) {
    const int N = static_cast<int>(returns.rows());
    const int I = static_cast<int>(returns.assets());
    const int first_anchor = cfg.window + 1;  // one extra row for the lagged factor slice
    if (N < cfg.window + 2) {
        throw BacktestError("run_backtest: need at least window + 2 return rows");
    }

    BacktestResult res;
    res.ledger.initial_value = 1.0;
    double value = 1.0;
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(I);
    bool have_prev = false;

    for (int anchor = first_anchor; anchor < N; ++anchor) {
        const std::string& date = returns.dates[static_cast<std::size_t>(anchor)];
        try {
            const std::uint64_t date_seed =
                core::derive_seed(cfg.seed, static_cast<std::uint64_t>(anchor));
            const SimulationArtifacts arts =
                simulate_scenarios(returns, factor_panels, cfg, anchor, date_seed);

            cvaropt::OptConfig opt_cfg;
            opt_cfg.alpha = alpha;
            opt_cfg.beta = cfg.beta;
            opt_cfg.turnover_cap = cfg.turnover_cap;
            if (have_prev) opt_cfg.prev_weights = prev;  // inception trade is cap-exempt
            const cvaropt::OptResult opt =
                cvaropt::optimize_portfolio({arts.scenarios}, opt_cfg);

            LedgerRow row;
            row.date = date;
            row.weights_before = prev;
            row.weights_after = opt.weights;
            row.turnover = (opt.weights - prev).cwiseAbs().sum();
            row.gross = opt.weights.dot(simple_returns_row(returns, anchor));
            row.cost = value * cfg.cost_rate * row.turnover;
            const double new_value = value * (1.0 + row.gross) - row.cost;
            row.net = new_value / value - 1.0;
            row.value = new_value;
            res.ledger.rows.push_back(row);

            if (cfg.collect_diagnostics) {
                if (res.diagnostics.dates.empty()) {
                    res.diagnostics.innovations.resize(N - first_anchor, I);
                    res.diagnostics.residuals.resize(N - first_anchor, I);
                }
                const int r = static_cast<int>(res.diagnostics.dates.size());
                res.diagnostics.dates.push_back(date);
                for (int i = 0; i < I; ++i) {
                    res.diagnostics.innovations(r, i) = arts.fits[i].h[cfg.window - 1];
                    res.diagnostics.residuals(r, i) = arts.factor_fits[i].residuals[cfg.window - 1];
                    if (cfg.factor_model != factors::FactorModelKind::none) {
                        const auto diag = factors::diagnostics(
                            arts.factor_fits[i], arts.fits[i].h, Eigen::MatrixXd());
                        FactorDiagRow fd;
                        fd.date = date;
                        fd.ticker = returns.tickers[static_cast<std::size_t>(i)];
                        fd.model = factors::to_string(cfg.factor_model);
                        fd.adj_r2 = diag.adj_r2;
                        fd.mae = diag.mae;
                        fd.bic = diag.bic;
                        for (bool s : diag.significant) fd.pvalue_flags += s ? '1' : '0';
                        res.diagnostics.factor_diags.push_back(std::move(fd));
                    }
                }
            }

            prev = opt.weights;
            have_prev = true;
            value = new_value;
        } catch (const Error& e) {
            throw BacktestError("backtest failed at date " + date + ": " + e.what());
        }
    }
    return res;
}

BacktestResult run_backtest(const data::PricePanel& prices,
                            const std::vector<data::FactorPanel>& factor_panels,
                            const BacktestConfig& cfg, double alpha) {
    return run_backtest(data::compute_log_returns(prices), factor_panels, cfg, alpha);
}

BacktestLedger ewbh_benchmark(const data::ReturnPanel& returns, double cost_rate, int first_row) {
    const int N = static_cast<int>(returns.rows());
    const int I = static_cast<int>(returns.assets());
    if (first_row < 0 || first_row >= N) throw BacktestError("ewbh_benchmark: bad first row");

    BacktestLedger ledger;
    ledger.initial_value = 1.0;
    double value = 1.0;
    Eigen::VectorXd positions = Eigen::VectorXd::Constant(I, 1.0 / I);  // dollars per asset
    for (int t = first_row; t < N; ++t) {
        LedgerRow row;
        row.date = returns.dates[static_cast<std::size_t>(t)];
        row.weights_before = t == first_row ? Eigen::VectorXd::Zero(I).eval()
                                            : (positions / positions.sum()).eval();
        row.weights_after = positions / positions.sum();
        row.turnover = t == first_row ? 1.0 : 0.0;
        const double pre = positions.sum();
        positions.array() *= (returns.returns.row(t).array().exp());
        row.gross = positions.sum() / pre - 1.0;
        row.cost = t == first_row ? value * cost_rate : 0.0;  // entry trade, full notional
        const double new_value = value * (1.0 + row.gross) - row.cost;
        row.net = new_value / value - 1.0;
        row.value = new_value;
        // keep dollar positions consistent with the costed value
        positions *= new_value / positions.sum();
        ledger.rows.push_back(row);
        value = new_value;
    }
    return ledger;
}

}  // namespace fcvar::backtest
