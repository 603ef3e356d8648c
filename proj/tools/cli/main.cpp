// fcvar command line: fit one filter, simulate one date's scenario matrix,
// optimize weights from a scenario file, run the rolling backtest, and turn
// ledgers into metric tables. Progress goes to stderr, data to files.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "fcvar/backtest/engine.hpp"
#include "fcvar/backtest/pca.hpp"
#include "fcvar/backtest/report.hpp"
#include "fcvar/core/errors.hpp"
#include "fcvar/core/rng.hpp"
#include "fcvar/core/parallel.hpp"
#include "fcvar/cvaropt/portfolio.hpp"
#include "fcvar/data/csv_io.hpp"
#include "fcvar/data/indicators.hpp"
#include "fcvar/nig/em.hpp"
#include "fcvar/ts/arma_garch.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace fcvar;

namespace {

struct LoadedData {
    data::ReturnPanel returns;
    std::vector<data::FactorPanel> factors;
    data::UniverseManifest universe;
};

LoadedData load_data(const cli::RunConfig& cfg) {
    LoadedData out;
    std::vector<std::string> tickers;
    if (!cfg.universe_path.empty()) {
        out.universe = data::load_universe(cfg.universe_path);
        tickers = out.universe.tickers;
    }
    const auto prices = data::load_price_csv(cfg.prices_path, tickers);
    out.returns = data::compute_log_returns(prices);
    cli::log_info(cfg, "loaded " + std::to_string(prices.rows()) + " price rows, " +
                           std::to_string(prices.assets()) + " assets");
    if (cfg.bt.factor_model != factors::FactorModelKind::none) {
        for (const auto& ticker : out.returns.tickers) {
            const std::string path = cfg.factors_dir + "/" + ticker + ".csv";
            out.factors.push_back(
                data::load_factor_csv(path, ticker, out.universe.factor_names));
        }
        data::align_dates(out.returns, out.factors);
        cli::log_info(cfg, "aligned dates across factors: " +
                               std::to_string(out.returns.rows()) + " rows remain");
    }
    return out;
}

int anchor_from_flag(const data::ReturnPanel& returns, const std::string& anchor) {
    if (anchor.empty()) return static_cast<int>(returns.rows()) - 1;
    // index or ISO date
    if (anchor.find('-') == std::string::npos) {
        return std::stoi(anchor);
    }
    for (std::size_t i = 0; i < returns.dates.size(); ++i) {
        if (returns.dates[i] == anchor) return static_cast<int>(i);
    }
    throw ConfigError("anchor date `" + anchor + "` not found in the return panel");
}

int cmd_fit(const cli::RunConfig& cfg, const std::string& ticker, const std::string& anchor,
            const std::string& spec_str) {
    const auto loaded = load_data(cfg);
    int col = -1;
    for (std::size_t i = 0; i < loaded.returns.tickers.size(); ++i) {
        if (loaded.returns.tickers[i] == ticker) col = static_cast<int>(i);
    }
    if (col < 0) throw ConfigError("ticker `" + ticker + "` not in the universe");
    const int t = anchor_from_flag(loaded.returns, anchor);
    const auto w = data::make_window(loaded.returns, {}, t, cfg.bt.window, false);

    ts::ArmaGarchFit fit;
    if (spec_str.empty()) {
        cli::log_info(cfg, "selecting orders by BIC over 81 candidates");
        fit = ts::select_model_bic(w.returns.col(col), cfg.bt.fit_options);
    } else {
        ts::ArmaGarchSpec spec;
        if (std::sscanf(spec_str.c_str(), "%d,%d,%d,%d", &spec.p, &spec.q, &spec.P, &spec.Q) != 4) {
            throw ConfigError("--spec expects `p,q,P,Q`");
        }
        fit = ts::fit_arma_garch(w.returns.col(col), spec, cfg.bt.fit_options);
    }
    const std::string path = cfg.out_dir + "/fit_" + ticker + ".txt";
    cli::write_file_atomic(path, ts::to_record(fit));
    cli::log_info(cfg, "spec (" + std::to_string(fit.spec.p) + "," + std::to_string(fit.spec.q) +
                           "," + std::to_string(fit.spec.P) + "," + std::to_string(fit.spec.Q) +
                           ") loglik " + std::to_string(fit.loglik) + " bic " +
                           std::to_string(fit.bic));
    cli::log_info(cfg, "wrote " + path);
    return 0;
}

int cmd_simulate(const cli::RunConfig& cfg, const std::string& anchor) {
    const auto loaded = load_data(cfg);
    const int t = anchor_from_flag(loaded.returns, anchor);
    const auto seed = core::derive_seed(cfg.bt.seed, static_cast<std::uint64_t>(t));
    const auto arts =
        backtest::simulate_scenarios(loaded.returns, loaded.factors, cfg.bt, t, seed);

    data::CsvTable table;
    table.columns = loaded.returns.tickers;
    table.values = arts.scenarios;
    cli::write_file_atomic(cfg.out_dir + "/scenarios.csv", data::format_csv(table, ""));
    cli::write_file_atomic(cfg.out_dir + "/nig_params.txt", arts.nig_record);
    for (std::size_t i = 0; i < arts.fits.size(); ++i) {
        cli::write_file_atomic(cfg.out_dir + "/fit_" + loaded.returns.tickers[i] + ".txt",
                               ts::to_record(arts.fits[i]));
    }
    cli::log_info(cfg, "wrote " + std::to_string(arts.scenarios.rows()) + " scenarios for " +
                           std::to_string(arts.scenarios.cols()) + " assets to " + cfg.out_dir);
    return 0;
}

int cmd_optimize(const cli::RunConfig& cfg, const std::string& scenario_path, double alpha,
                 const std::string& prev_path, const std::string& dump_path) {
    const auto table = data::read_csv(scenario_path, false);
    cvaropt::ScenarioMatrix sc;
    sc.returns = table.values;
    cvaropt::OptConfig opt;
    opt.alpha = alpha;
    opt.beta = cfg.bt.beta;
    opt.turnover_cap = cfg.bt.turnover_cap;
    if (!prev_path.empty()) {
        const auto prev = data::read_csv(prev_path, true);
        opt.prev_weights = prev.values.col(0);
    } else {
        opt.prev_weights.reset();
    }
    if (!dump_path.empty()) {
        std::ostringstream os;
        cvaropt::dump_lp(cvaropt::build_lp(sc, opt), os);
        cli::write_file_atomic(dump_path, os.str());
        cli::log_info(cfg, "wrote LP dump to " + dump_path);
    }
    const auto res = cvaropt::optimize_portfolio(sc, opt);

    std::ostringstream os;
    os.precision(17);
    os << "ticker,weight\n";
    for (Eigen::Index i = 0; i < res.weights.size(); ++i) {
        os << table.columns[static_cast<std::size_t>(i)] << ',' << res.weights[i] << '\n';
    }
    cli::write_file_atomic(cfg.out_dir + "/weights.csv", os.str());
    cli::log_info(cfg, "objective " + std::to_string(res.objective) + ", expected return " +
                           std::to_string(res.expected_return) + ", cvar " +
                           std::to_string(res.cvar));
    cli::log_info(cfg, "wrote " + cfg.out_dir + "/weights.csv");
    return 0;
}

std::string alpha_tag(double alpha) {
    std::ostringstream os;
    os << alpha;
    std::string s = os.str();
    for (auto& c : s) {
        if (c == '.') c = 'p';
    }
    return s;
}

int cmd_backtest(const cli::RunConfig& cfg) {
    auto loaded = load_data(cfg);
    auto bt_cfg = cfg.bt;
    bt_cfg.collect_diagnostics = cfg.diagnostics;
    for (double alpha : cfg.bt.alphas) {
        cli::log_info(cfg, "backtest alpha=" + std::to_string(alpha) + " model=" +
                               factors::to_string(cfg.bt.factor_model));
        const auto res = backtest::run_backtest(loaded.returns, loaded.factors, bt_cfg, alpha);
        const std::string stem = factors::to_string(cfg.bt.factor_model) + "_alpha" +
                                 alpha_tag(alpha);
        cli::write_file_atomic(cfg.out_dir + "/ledger_" + stem + ".csv",
                               backtest::ledger_csv(res.ledger, loaded.returns.tickers));
        cli::log_info(cfg, "wrote " + cfg.out_dir + "/ledger_" + stem + ".csv (" +
                               std::to_string(res.ledger.rows.size()) + " rows)");
        if (cfg.diagnostics) {
            cli::write_file_atomic(cfg.out_dir + "/diagnostics_" + stem + ".csv",
                                   backtest::diagnostics_csv(res.diagnostics.factor_diags));
            const int oos = static_cast<int>(res.diagnostics.dates.size());
            const int pca_window = std::min(cfg.bt.window, oos / 2);
            if (pca_window >= 20) {
                Eigen::MatrixXd rets(oos, loaded.returns.assets());
                const int first = static_cast<int>(loaded.returns.rows()) - oos;
                rets = loaded.returns.returns.bottomRows(oos);
                const auto dyn = backtest::pca_explained_dynamics(
                    rets, res.diagnostics.innovations, res.diagnostics.residuals, pca_window);
                std::vector<std::string> anchor_dates(
                    res.diagnostics.dates.begin() + (pca_window - 1),
                    res.diagnostics.dates.end());
                cli::write_file_atomic(cfg.out_dir + "/pca_" + stem + ".csv",
                                       backtest::pca_csv(dyn, anchor_dates));
                (void)first;
            } else {
                cli::log_info(cfg, "out-of-sample range too short for pca diagnostics");
            }
        }
    }
    return 0;
}

int cmd_report(const cli::RunConfig& cfg, const std::vector<std::string>& ledger_paths,
               bool with_ewbh) {
    std::vector<std::pair<std::string, backtest::BacktestLedger>> ledgers;
    for (const auto& path : ledger_paths) {
        ledgers.emplace_back(fs::path(path).stem().string(), backtest::ledger_from_csv(path));
    }
    if (ledgers.empty()) throw ConfigError("report: at least one --ledger is required");

    if (with_ewbh) {
        auto tmp = cfg;
        tmp.bt.factor_model = factors::FactorModelKind::none;
        const auto loaded = load_data(tmp);
        const std::string& first_date = ledgers.front().second.rows.front().date;
        int first_row = -1;
        for (std::size_t i = 0; i < loaded.returns.dates.size(); ++i) {
            if (loaded.returns.dates[i] == first_date) first_row = static_cast<int>(i);
        }
        if (first_row < 0) {
            throw ConfigError("report: ledger start date not found in the price data");
        }
        auto bench = backtest::ewbh_benchmark(loaded.returns, cfg.bt.cost_rate, first_row);
        bench.rows.resize(std::min(bench.rows.size(), ledgers.front().second.rows.size()));
        ledgers.emplace_back("ewbh", std::move(bench));
    }

    std::vector<std::pair<std::string, backtest::MetricsReport>> metrics;
    for (const auto& [label, ledger] : ledgers) {
        metrics.emplace_back(label, backtest::compute_metrics(ledger));
    }
    cli::write_file_atomic(cfg.out_dir + "/metrics.csv", backtest::metrics_csv(metrics));
    cli::log_info(cfg, "wrote " + cfg.out_dir + "/metrics.csv");

    const std::size_t n = ledgers.front().second.rows.size();
    bool aligned = true;
    for (const auto& [label, ledger] : ledgers) aligned = aligned && ledger.rows.size() == n;
    if (aligned) {
        cli::write_file_atomic(cfg.out_dir + "/value_paths.csv",
                               backtest::value_path_csv(ledgers));
        cli::log_info(cfg, "wrote " + cfg.out_dir + "/value_paths.csv");
    } else {
        cli::log_info(cfg, "ledgers differ in length; skipping value_paths.csv");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"factor-augmented scenario engine and mean-CVaR backtester"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    cli::RunConfig cfg;
    std::string config_path;
    std::string ticker, anchor, spec_str, scenario_path, prev_path, dump_path;
    std::vector<std::string> ledger_paths;
    double opt_alpha = 0.5;
    bool with_ewbh = false;
    long long seed_flag = -1;
    std::string alphas_flag, model_flag, cap_flag;

    app.add_option("--config", config_path, "key-value config file");
    app.add_option("--prices", cfg.prices_path, "price CSV (date,<ticker>,...)");
    app.add_option("--factors-dir", cfg.factors_dir, "directory with <ticker>.csv factor files");
    app.add_option("--universe", cfg.universe_path, "universe manifest");
    app.add_option("--window", cfg.bt.window, "rolling window length");
    app.add_option("--scenarios", cfg.bt.scenarios, "simulated scenarios per date");
    app.add_option("--beta", cfg.bt.beta, "CVaR level");
    app.add_option("--alphas", alphas_flag, "comma list of risk-reward alphas");
    app.add_option("--cost-rate", cfg.bt.cost_rate, "per-leg transaction cost");
    app.add_option("--turnover-cap", cap_flag, "daily turnover cap (or `none`)");
    app.add_option("--factor-model", model_flag, "none|rlr|gam");
    app.add_option("--seed", seed_flag, "random seed (mandatory for simulate/backtest)");
    app.add_option("--out-dir", cfg.out_dir, "output directory");
    app.add_option("--log-level", cfg.log_level, "quiet|info|debug");
    app.add_option("--threads", cfg.threads, "max worker threads (0 = auto, 1 = serial)");
    app.add_flag("--diagnostics", cfg.diagnostics, "emit per-date factor/pca diagnostics");

    auto* fit = app.add_subcommand("fit", "fit one asset's filter on one window");
    fit->add_option("--ticker", ticker, "asset to fit")->required();
    fit->add_option("--anchor", anchor, "anchor date (ISO) or row index; default last row");
    fit->add_option("--spec", spec_str, "force orders p,q,P,Q instead of BIC selection");

    auto* simulate = app.add_subcommand("simulate", "scenario matrix for one date");
    simulate->add_option("--anchor", anchor, "anchor date (ISO) or row index; default last row");

    auto* optimize = app.add_subcommand("optimize", "mean-CVaR weights from a scenario file");
    optimize->add_option("--scenarios-file", scenario_path, "scenario CSV")->required();
    optimize->add_option("--alpha", opt_alpha, "risk-reward alpha");
    optimize->add_option("--prev-weights", prev_path, "previous weights CSV (ticker,weight)");
    optimize->add_option("--dump-lp", dump_path, "write the LP instance in text form");

    app.add_subcommand("backtest", "full rolling backtest");
    auto* report = app.add_subcommand("report", "metric tables from ledgers");
    report->add_option("--ledger", ledger_paths, "ledger CSV (repeatable)")->required();
    report->add_flag("--ewbh", with_ewbh, "add the equal-weight buy-and-hold benchmark row");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    // precedence: defaults < config file < flags. Flags were parsed straight
    // into cfg, so re-apply them after the file pass.
    std::vector<std::string> errors;
    if (!config_path.empty()) {
        cli::RunConfig from_file;
        apply_config_file(config_path, from_file, errors);
        auto merged = from_file;
        // flags win wherever the user supplied them
        if (app.count("--prices")) merged.prices_path = cfg.prices_path;
        if (app.count("--factors-dir")) merged.factors_dir = cfg.factors_dir;
        if (app.count("--universe")) merged.universe_path = cfg.universe_path;
        if (app.count("--window")) merged.bt.window = cfg.bt.window;
        if (app.count("--scenarios")) merged.bt.scenarios = cfg.bt.scenarios;
        if (app.count("--beta")) merged.bt.beta = cfg.bt.beta;
        if (app.count("--cost-rate")) merged.bt.cost_rate = cfg.bt.cost_rate;
        if (app.count("--out-dir")) merged.out_dir = cfg.out_dir;
        if (app.count("--log-level")) merged.log_level = cfg.log_level;
        if (app.count("--threads")) merged.threads = cfg.threads;
        if (app.count("--diagnostics")) merged.diagnostics = cfg.diagnostics;
        cfg = merged;
    }
    if (!alphas_flag.empty()) {
        bool ok = true;
        std::vector<double> v;
        std::stringstream ss(alphas_flag);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                v.push_back(std::stod(cell));
            } catch (...) {
                ok = false;
            }
        }
        if (ok && !v.empty()) cfg.bt.alphas = v;
        else errors.push_back("alphas: bad list `" + alphas_flag + "`");
    }
    if (!model_flag.empty()) {
        try {
            cfg.bt.factor_model = factors::factor_model_from_string(model_flag);
        } catch (const Error& e) {
            errors.push_back(e.what());
        }
    }
    if (!cap_flag.empty()) {
        if (cap_flag == "none") {
            cfg.bt.turnover_cap.reset();
        } else {
            try {
                cfg.bt.turnover_cap = std::stod(cap_flag);
            } catch (...) {
                errors.push_back("turnover_cap: bad value `" + cap_flag + "`");
            }
        }
    }
    if (seed_flag >= 0) {
        cfg.bt.seed = static_cast<std::uint64_t>(seed_flag);
        cfg.seed_set = true;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    validate(cfg, sub, errors);
    if (!errors.empty()) {
        std::cerr << "configuration errors:\n";
        for (const auto& e : errors) std::cerr << "  - " << e << '\n';
        return 2;
    }
    core::set_max_threads(cfg.threads);

    try {
        if (sub == "fit") return cmd_fit(cfg, ticker, anchor, spec_str);
        if (sub == "simulate") return cmd_simulate(cfg, anchor);
        if (sub == "optimize") {
            return cmd_optimize(cfg, scenario_path, opt_alpha, prev_path, dump_path);
        }
        if (sub == "backtest") return cmd_backtest(cfg);
        if (sub == "report") return cmd_report(cfg, ledger_paths, with_ewbh);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
