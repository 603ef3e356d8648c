// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Each block is self-contained and uses independent oracles (grid
// search, quadrature, closed forms, Monte Carlo) rather than the code paths
// it is checking.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "../testutil/synthetic.hpp"
#include "fcvar/backtest/engine.hpp"
#include "fcvar/backtest/metrics.hpp"
#include "fcvar/backtest/pca.hpp"
#include "fcvar/core/rng.hpp"
#include "fcvar/core/special.hpp"
#include "fcvar/cvaropt/portfolio.hpp"
#include "fcvar/factors/factor_model.hpp"
#include "fcvar/nig/em.hpp"
#include "fcvar/nig/nig_distribution.hpp"
#include "fcvar/ts/arma_garch.hpp"

using namespace fcvar;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), seconds, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run(int number, const std::string& name,
         const std::function<bool(std::string&)>& criterion) {
    std::string detail;
    bool pass = false;
    const auto start = std::chrono::steady_clock::now();
    try {
        pass = criterion(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(number, name, pass, detail, secs);
}

// ---------------------------------------------------------------- fixture --

struct Fixture {
    data::ReturnPanel returns;
    std::vector<data::FactorPanel> factors;
};

// Three assets with AR-GARCH dynamics whose innovations partially follow the
// (lagged) observable factors; two factors per asset in [0,1].
Fixture make_fixture(int n, std::uint64_t seed) {
    Fixture fx;
    const int I = 3, K = 2;
    core::Rng rng(seed);

    std::vector<Eigen::MatrixXd> fvals(I, Eigen::MatrixXd(n, K));
    for (int i = 0; i < I; ++i) {
        double latent = 0.0;
        for (int t = 0; t < n; ++t) {
            latent = 0.9 * latent + 0.3 * rng.normal();
            fvals[i](t, 0) = 1.0 / (1.0 + std::exp(-latent));
            fvals[i](t, 1) = rng.uniform();
        }
    }

    fx.returns.returns.resize(n, I);
    const double ar[3] = {0.2, 0.0, 0.35};
    const double drift[3] = {4e-4, 1e-4, 0.0};
    for (int i = 0; i < I; ++i) {
        const double c2 = 2e-6, phi = 0.75, gam = 0.1;
        double s_prev = c2 / (1.0 - phi - gam), e_prev = 0.0, r_prev = 0.0;
        for (int t = 0; t < n; ++t) {
            const double f_lag = t > 0 ? fvals[i](t - 1, 0) : 0.5;
            const double h = 0.45 * std::sin(2.0 * M_PI * f_lag) + 0.9 * rng.normal();
            const double s = c2 + phi * s_prev + gam * e_prev * e_prev;
            const double e = std::sqrt(s) * h;
            const double r = drift[i] + ar[i] * r_prev + e;
            fx.returns.returns(t, i) = r;
            s_prev = s;
            e_prev = e;
            r_prev = r;
        }
        fx.returns.tickers.push_back("SYN" + std::to_string(i));
    }
    for (int t = 0; t < n; ++t) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "d%05d", t);
        fx.returns.dates.push_back(buf);
    }
    for (int i = 0; i < I; ++i) {
        data::FactorPanel f;
        f.ticker = fx.returns.tickers[static_cast<std::size_t>(i)];
        f.dates = fx.returns.dates;
        f.factor_names = {"mom", "noise"};
        f.values = fvals[i];
        fx.factors.push_back(std::move(f));
    }
    return fx;
}

backtest::BacktestConfig fixture_config() {
    backtest::BacktestConfig cfg;
    cfg.window = 150;
    cfg.scenarios = 400;
    cfg.beta = 0.99;
    cfg.cost_rate = 0.0002;
    cfg.turnover_cap = 0.05;
    cfg.factor_model = factors::FactorModelKind::gam;
    cfg.seed = 20240517;
    cfg.collect_diagnostics = true;
    return cfg;
}

bool ledgers_identical(const backtest::BacktestLedger& a, const backtest::BacktestLedger& b,
                       std::size_t upto = SIZE_MAX) {
    if (a.rows.size() != b.rows.size()) return false;
    const std::size_t n = std::min(upto, a.rows.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ra = a.rows[i];
        const auto& rb = b.rows[i];
        if (ra.date != rb.date || ra.gross != rb.gross || ra.cost != rb.cost ||
            ra.net != rb.net || ra.value != rb.value) {
            return false;
        }
        if ((ra.weights_after - rb.weights_after).cwiseAbs().maxCoeff() != 0.0) return false;
    }
    return true;
}

// ------------------------------------------------------------- criteria ---

bool criterion_determinism(std::string& detail) {
    const Fixture fx = make_fixture(252, 99);  // 150 window + 1 lag + 100 oos + 1
    const auto cfg = fixture_config();
    const auto t0 = std::chrono::steady_clock::now();
    const auto a = backtest::run_backtest(fx.returns, fx.factors, cfg, 0.5);
    const auto b = backtest::run_backtest(fx.returns, fx.factors, cfg, 0.5);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream os;
    os << a.ledger.rows.size() << " oos days, two runs in " << static_cast<int>(secs) << "s";
    detail = os.str();
    if (a.ledger.rows.size() != 100) return false;
    if (secs >= 300.0) return false;
    return ledgers_identical(a.ledger, b.ledger);
}

bool criterion_arma_garch_recovery(std::string& detail) {
    const double ar1 = 0.5, c2 = 1e-5, phi = 0.8, gam = 0.1;
    int cover_ok = 0, select_ok = 0;
    const int runs = 20;
    for (int s = 0; s < runs; ++s) {
        const auto r = testutil::simulate_ar_garch(2000, 0.0, ar1, c2, phi, gam, 4200 + s);
        const auto fit = ts::fit_arma_garch(r, {1, 0, 1, 1});
        const auto se = ts::param_stderr(fit, r);
        // natural order: c1, ar1, c2, garch1, arch1
        const bool ok = std::fabs(fit.c1 - 0.0) <= 3.0 * se[0] &&
                        std::fabs(fit.ar[0] - ar1) <= 3.0 * se[1] &&
                        std::fabs(fit.c2 - c2) <= 3.0 * se[2] &&
                        std::fabs(fit.garch[0] - phi) <= 3.0 * se[3] &&
                        std::fabs(fit.arch[0] - gam) <= 3.0 * se[4];
        if (ok) ++cover_ok;
        const auto sel = ts::select_model_bic(r);
        if (sel.spec.p >= 1 && sel.spec.P >= 1 && sel.spec.Q >= 1) ++select_ok;
    }
    std::ostringstream os;
    os << "coverage " << cover_ok << "/20, selection " << select_ok << "/20";
    detail = os.str();
    return cover_ok >= 16 && select_ok >= 16;
}

bool criterion_robust_oracle(std::string& detail) {
    int huber_ok = 0;
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 120 + 10 * (rep % 5);
        const int K = 1 + rep % 3;
        const auto F = testutil::uniform_matrix(n, K, 900 + rep);
        const auto noise = testutil::gaussian_series(n, 0.0, 0.2, 950 + rep);
        Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(K, 0.5, -0.4);
        const Eigen::VectorXd h = (F * b).array() + 0.1 + noise.array();
        factors::RobustConfig cfg = factors::RobustConfig::huber();
        cfg.kappa = 1e9;
        const auto fit = factors::fit_rlr(h, F, cfg);
        const auto oracle = testutil::ols_oracle(h, F);
        double err = std::fabs(fit.intercept - oracle[0]);
        for (int j = 0; j < K; ++j) err = std::max(err, std::fabs(fit.coefs[j] - oracle[j + 1]));
        if (err <= 1e-8) ++huber_ok;
    }

    bool tukey_ok = true;
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 200;
        const auto F = testutil::uniform_matrix(n, 2, 700 + rep);
        const auto noise = testutil::gaussian_series(n, 0.0, 0.01, 750 + rep);
        Eigen::VectorXd h = (F * Eigen::Vector2d(0.6, -0.3)).array() + 0.2 + noise.array();
        const Eigen::VectorXd clean = h;
        h[17 + rep] += 100.0 * 0.01;
        const auto fit = factors::fit_rlr(h, F, factors::RobustConfig::tukey());
        const auto oracle = testutil::ols_oracle(clean, F);
        if (fit.weights[17 + rep] != 0.0) tukey_ok = false;
        if (std::fabs(fit.intercept - oracle[0]) > 1e-3) tukey_ok = false;
        for (int j = 0; j < 2; ++j) {
            if (std::fabs(fit.coefs[j] - oracle[j + 1]) > 1e-3) tukey_ok = false;
        }
    }
    std::ostringstream os;
    os << "huber-vs-ols " << huber_ok << "/25, tukey outlier " << (tukey_ok ? "ok" : "bad");
    detail = os.str();
    return huber_ok == 25 && tukey_ok;
}

bool criterion_gam_oracle(std::string& detail) {
    bool fixed_ok = true;
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 160, K = 2, q = 10;
        const auto F = testutil::uniform_matrix(n, K, 1100 + rep);
        const auto noise = testutil::gaussian_series(n, 0.0, 0.1, 1150 + rep);
        Eigen::VectorXd h(n);
        for (int i = 0; i < n; ++i) {
            h[i] = std::sin(6.0 * F(i, 0)) - 0.4 * F(i, 1) + noise[i];
        }
        const double l1 = std::pow(10.0, rep - 2), l2 = std::pow(10.0, 2 - rep);
        factors::GamConfig cfg;
        cfg.basis_dim = q;
        cfg.lambdas = {l1, l2};
        const auto fit = factors::fit_gam(h, F, cfg);

        const auto basis = factors::SplineBasis::cubic(q);
        Eigen::MatrixXd X(n, 1 + K * q);
        X.col(0).setOnes();
        for (int k = 0; k < K; ++k) {
            Eigen::MatrixXd B(n, q);
            for (int i = 0; i < n; ++i) {
                B.row(i) = factors::bspline_basis(F(i, k), basis).transpose();
            }
            X.middleCols(1 + k * q, q) = B.rowwise() - B.colwise().mean();
        }
        Eigen::MatrixXd pen = Eigen::MatrixXd::Zero(1 + K * q, 1 + K * q);
        const Eigen::MatrixXd P = factors::second_difference_penalty(q);
        pen.block(1, 1, q, q) = l1 * P;
        pen.block(1 + q, 1 + q, q, q) = l2 * P;
        const Eigen::VectorXd z = (X.transpose() * X + pen).ldlt().solve(X.transpose() * h);
        if (std::fabs(fit.intercept - z[0]) > 1e-8) fixed_ok = false;
        for (int k = 0; k < K && fixed_ok; ++k) {
            for (int j = 0; j < q; ++j) {
                if (std::fabs(fit.coefs(j, k) - z[1 + k * q + j]) > 1e-8) fixed_ok = false;
            }
        }
    }

    bool affine_ok = true;
    {
        const int n = 220, K = 2;
        const auto F = testutil::uniform_matrix(n, K, 1200);
        const auto noise = testutil::gaussian_series(n, 0.0, 0.05, 1201);
        const Eigen::VectorXd h = (F * Eigen::Vector2d(0.7, -0.2)).array() + 0.3 + noise.array();
        factors::GamConfig cfg;
        cfg.lambdas = {1e12, 1e12};
        const auto fit = factors::fit_gam(h, F, cfg);
        const auto ols = testutil::ols_oracle(h, F);
        for (int i = 0; i < 40; ++i) {
            const Eigen::VectorXd x = testutil::uniform_matrix(1, K, 1300 + i).row(0).transpose();
            const double lin = ols[0] + ols[1] * x[0] + ols[2] * x[1];
            if (std::fabs(factors::predict_gam(fit, x) - lin) > 1e-4) affine_ok = false;
        }
    }
    detail = std::string("fixed-lambda oracle ") + (fixed_ok ? "ok" : "bad") +
             ", affine limit " + (affine_ok ? "ok" : "bad");
    return fixed_ok && affine_ok;
}

struct Density1dCtx {
    nig::NigParams p;
};
double density_1d(double x, const void* ctx) {
    const auto* c = static_cast<const Density1dCtx*>(ctx);
    return std::exp(nig::nig_log_density(Eigen::VectorXd::Constant(1, x), c->p));
}

bool criterion_nig_suite(std::string& detail) {
    std::ostringstream os;
    bool ok = true;

    // EM monotone on 25 random datasets
    int mono = 0;
    for (int rep = 0; rep < 25; ++rep) {
        const int I = 2 + rep % 2;
        Eigen::MatrixXd data = testutil::gaussian_matrix(300, I, 5000 + rep) * 0.01;
        if (rep % 3 == 0) {
            // heavier tails: scale a block of rows
            data.topRows(40) *= 3.0;
        }
        nig::EmOptions opts;
        opts.max_iter = 120;
        const auto [p, trace] = nig::fit_nig_em(data, opts);
        bool this_mono = true;
        for (std::size_t i = 1; i < trace.loglik.size(); ++i) {
            if (trace.loglik[i] < trace.loglik[i - 1] - 1e-8 * std::fabs(trace.loglik[i - 1])) {
                this_mono = false;
            }
        }
        if (this_mono) ++mono;
    }
    os << "em-monotone " << mono << "/25";
    ok = ok && mono == 25;

    // 1-D density integrates to one
    bool mass_ok = true;
    for (double abar : {0.6, 1.5, 4.0}) {
        Density1dCtx ctx;
        ctx.p.alpha_bar = abar;
        ctx.p.mu = Eigen::VectorXd::Constant(1, 0.1);
        ctx.p.gamma = Eigen::VectorXd::Constant(1, 0.2);
        ctx.p.sigma = Eigen::MatrixXd::Constant(1, 1, 0.8);
        const double mass = core::adaptive_simpson(density_1d, &ctx, -30.0, 30.0, 1e-10);
        if (std::fabs(mass - 1.0) > 1e-6) mass_ok = false;
    }
    os << ", density-mass " << (mass_ok ? "ok" : "bad");
    ok = ok && mass_ok;

    // sampler moments at n = 1e6 within 3 Monte Carlo s.e.
    bool moments_ok = true;
    {
        nig::NigParams p;
        p.alpha_bar = 2.0;
        p.mu = Eigen::Vector2d(0.02, -0.05);
        p.gamma = Eigen::Vector2d(0.25, -0.15);
        p.sigma.resize(2, 2);
        p.sigma << 1.0, 0.35, 0.35, 0.8;
        const int n = 1000000;
        const Eigen::MatrixXd x = nig::sample_nig(p, n, 777);
        const Eigen::VectorXd mean = x.colwise().mean();
        const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
        const Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
        const Eigen::MatrixXd cov_want =
            p.sigma + (1.0 / p.alpha_bar) * p.gamma * p.gamma.transpose();
        for (int j = 0; j < 2; ++j) {
            const double se = std::sqrt(cov(j, j) / n);
            if (std::fabs(mean[j] - (p.mu[j] + p.gamma[j])) > 3.0 * se) moments_ok = false;
        }
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                Eigen::ArrayXd prod = centered.col(a).array() * centered.col(b).array();
                const double se =
                    std::sqrt((prod - prod.mean()).square().sum() / (double(n) - 1.0)) /
                    std::sqrt(double(n));
                if (std::fabs(cov(a, b) - cov_want(a, b)) > 3.0 * se) moments_ok = false;
            }
        }
    }
    os << ", sampler-moments " << (moments_ok ? "ok" : "bad");
    ok = ok && moments_ok;

    // parameter recovery on synthetic I=3 data
    bool recover_ok = true;
    {
        nig::NigParams truth;
        truth.alpha_bar = 1.5;
        truth.mu = Eigen::Vector3d(0.01, -0.02, 0.0);
        truth.gamma = Eigen::Vector3d(0.15, -0.1, 0.05);
        truth.sigma.resize(3, 3);
        truth.sigma << 1.0, 0.3, 0.1, 0.3, 0.9, 0.2, 0.1, 0.2, 1.1;
        const Eigen::MatrixXd data = nig::sample_nig(truth, 20000, 31415);
        const auto [p, trace] = nig::fit_nig_em(data);
        const double scale = std::sqrt(truth.sigma.diagonal().mean());
        if ((p.mu - truth.mu).cwiseAbs().maxCoeff() > 0.05 * scale) recover_ok = false;
        if ((p.gamma - truth.gamma).cwiseAbs().maxCoeff() > 0.05 * scale) recover_ok = false;
        const double frob = (p.sigma - truth.sigma).norm() / truth.sigma.norm();
        if (frob > 0.10) recover_ok = false;
        os << ", recovery " << (recover_ok ? "ok" : "bad") << " (frob "
           << static_cast<int>(100 * frob) << "%)";
    }
    ok = ok && recover_ok;

    // gaussian data pushes alpha_bar toward the gaussian limit
    bool gauss_ok = true;
    {
        const Eigen::MatrixXd data = testutil::gaussian_matrix(5000, 2, 8888) * 0.01;
        const auto [p, trace] = nig::fit_nig_em(data);
        if (p.alpha_bar <= 20.0) gauss_ok = false;
        // gaussian mle loglik
        const Eigen::RowVectorXd mean = data.colwise().mean();
        const Eigen::MatrixXd centered = data.rowwise() - mean;
        const Eigen::MatrixXd cov = centered.transpose() * centered / 5000.0;
        const double logdet = std::log(cov.determinant());
        const double gauss_ll =
            -0.5 * 5000.0 * (2.0 * std::log(2.0 * M_PI) + logdet + 2.0);
        const double nig_ll = trace.loglik.back();
        if (std::fabs(nig_ll - gauss_ll) / std::fabs(gauss_ll) > 0.005) gauss_ok = false;
        os << ", gaussian-limit " << (gauss_ok ? "ok" : "bad") << " (abar "
           << static_cast<int>(p.alpha_bar) << ")";
    }
    ok = ok && gauss_ok;

    detail = os.str();
    return ok;
}

bool criterion_lp_optimality(std::string& detail) {
    int optimal_ok = 0;
    const int instances = 50;
    for (int inst = 0; inst < instances; ++inst) {
        const int I = 1 + inst % 4;
        const int S = I == 4 ? 100 : 60 + (inst * 7) % 140;
        cvaropt::ScenarioMatrix sc;
        sc.returns = testutil::gaussian_matrix(S, I, 2000 + inst) * 0.02;
        sc.returns.col(0).array() += 0.002;
        const double alpha = (inst % 5) * 0.25;
        const double beta = inst % 2 ? 0.95 : 0.9;
        cvaropt::OptConfig cfg;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.prev_weights.reset();
        const auto res = cvaropt::optimize_portfolio(sc, cfg);
        double best = 1e300;
        bool dominated = true;
        testutil::simplex_grid(I, 0.01, [&](const Eigen::VectorXd& w) {
            const double obj = testutil::mean_cvar_objective(sc.returns, w, alpha, beta);
            best = std::min(best, obj);
            if (res.objective > obj + 1e-6) dominated = false;
        });
        const double lip = alpha * sc.returns.colwise().mean().cwiseAbs().maxCoeff() +
                           (1.0 - alpha) * sc.returns.cwiseAbs().maxCoeff();
        const bool within_res = res.objective >= best - lip * I * 0.01 - 1e-6;
        if (dominated && within_res) ++optimal_ok;
    }

    // alpha sweep monotonicity (exact LP values)
    bool sweep_ok = true;
    for (int inst = 0; inst < 10; ++inst) {
        cvaropt::ScenarioMatrix sc;
        sc.returns = testutil::gaussian_matrix(150, 3, 3000 + inst) * 0.02;
        sc.returns.col(inst % 3).array() += 0.004;
        double prev_ret = -1e300, prev_cvar = -1e300;
        for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            cvaropt::OptConfig cfg;
            cfg.alpha = alpha;
            cfg.beta = 0.95;
            cfg.prev_weights.reset();
            const auto res = cvaropt::optimize_portfolio(sc, cfg);
            const double cv = cvaropt::cvar_of_weights(sc, res.weights, 0.95);
            if (res.expected_return < prev_ret - 1e-9 || cv < prev_cvar - 1e-9) sweep_ok = false;
            prev_ret = res.expected_return;
            prev_cvar = cv;
        }
    }
    std::ostringstream os;
    os << "grid-oracle " << optimal_ok << "/" << instances << ", sweep "
       << (sweep_ok ? "monotone" : "violated");
    detail = os.str();
    return optimal_ok == instances && sweep_ok;
}

bool criterion_metric_identities(std::string& detail) {
    bool ok = true;
    std::vector<double> seq(100);
    for (int i = 0; i < 100; ++i) seq[i] = i + 1.0;
    const auto t = backtest::cvar_empirical(seq, 0.95);
    ok = ok && t.lower == 3.0 && t.upper == 98.0;

    ok = ok && backtest::max_drawdown({1, 2, 3}) == 0.0;
    ok = ok && backtest::max_drawdown({100, 50, 75}) == 50.0;
    ok = ok && backtest::max_drawdown({100, 80, 120, 60}) == 50.0;

    const auto r = testutil::gaussian_series(800, 3e-4, 0.01, 246);
    std::vector<double> v(r.data(), r.data() + r.size());
    const auto rr = backtest::rr_ratios(v, 0.95);
    const auto tails = backtest::cvar_empirical(v, 0.95);
    ok = ok && std::fabs(rr.starr * std::fabs(tails.lower) - r.mean()) < 1e-12;

    std::vector<double> sym;
    for (int i = 1; i <= 50; ++i) {
        sym.push_back(0.001 * i);
        sym.push_back(-0.001 * i);
    }
    const auto rs = backtest::rr_ratios(sym, 0.95);
    ok = ok && std::fabs(rs.rachev - 1.0) < 1e-12;
    detail = ok ? "cvar/md/starr/rachev identities exact" : "identity violated";
    return ok;
}

bool criterion_gam_vs_rlr(std::string& detail) {
    std::vector<double> gam_r2, rlr_r2;
    for (int w = 0; w < 50; ++w) {
        const int n = 200;
        const auto F = testutil::uniform_matrix(n, 2, 6000 + w);
        const auto noise = testutil::gaussian_series(n, 0.0, 0.2, 6100 + w);
        Eigen::VectorXd h(n);
        for (int i = 0; i < n; ++i) {
            h[i] = std::sin(2.0 * M_PI * F(i, 0)) + std::cos(2.0 * M_PI * F(i, 1)) + noise[i];
        }
        const auto g = factors::fit_factor_model(factors::FactorModelKind::gam, h, F);
        const auto r = factors::fit_factor_model(factors::FactorModelKind::rlr, h, F);
        gam_r2.push_back(factors::diagnostics(g, h, F).adj_r2);
        rlr_r2.push_back(factors::diagnostics(r, h, F).adj_r2);
    }
    std::sort(gam_r2.begin(), gam_r2.end());
    std::sort(rlr_r2.begin(), rlr_r2.end());
    const double med_gam = 0.5 * (gam_r2[24] + gam_r2[25]);
    const double med_rlr = 0.5 * (rlr_r2[24] + rlr_r2[25]);
    std::ostringstream os;
    os << "median adj-R2 gam " << med_gam << " vs rlr " << med_rlr;
    detail = os.str();
    return med_gam > med_rlr;
}

bool criterion_pca_residuals(std::string& detail) {
    // planted factor structure observed through the factor panels; the
    // pipeline's own pieces produce per-date innovations and residuals
    const int n = 420, I = 4, T = 120;
    core::Rng rng(31337);
    Eigen::MatrixXd f(n, 1);
    double latent = 0.0;
    for (int t = 0; t < n; ++t) {
        latent = 0.85 * latent + 0.4 * rng.normal();
        f(t, 0) = 1.0 / (1.0 + std::exp(-latent));
    }
    data::ReturnPanel returns;
    returns.returns.resize(n, I);
    for (int i = 0; i < I; ++i) {
        returns.tickers.push_back("P" + std::to_string(i));
        for (int t = 0; t < n; ++t) {
            const double f_lag = t > 0 ? f(t - 1, 0) : 0.5;
            const double h = (0.9 + 0.1 * i) * (2.0 * f_lag - 1.0) + 0.45 * rng.normal();
            returns.returns(t, i) = 0.01 * h;
        }
    }
    for (int t = 0; t < n; ++t) returns.dates.push_back("d" + std::to_string(t));

    const int first = T + 1;
    const int n_oos = n - first;
    Eigen::MatrixXd innov(n_oos, I), resid(n_oos, I), rets(n_oos, I);
    for (int a = first; a < n; ++a) {
        for (int i = 0; i < I; ++i) {
            const Eigen::VectorXd col = returns.returns.col(i).segment(a - T, T);
            const auto fit = ts::fit_arma_garch(col, {0, 0, 0, 0});
            Eigen::MatrixXd Fw(T, 1);
            for (int t = 0; t < T; ++t) Fw(t, 0) = f(a - T - 1 + t, 0);
            const auto rfit = factors::fit_rlr(fit.h, Fw, factors::RobustConfig::tukey());
            innov(a - first, i) = fit.h[T - 1];
            resid(a - first, i) = rfit.residuals[T - 1];
            rets(a - first, i) = returns.returns(a, i);
        }
    }
    const auto dyn = backtest::pca_explained_dynamics(rets, innov, resid, 100, 25);
    bool ok = true;
    double max_gap = -1.0;
    for (std::size_t w = 0; w < dyn.innovations_share.size(); ++w) {
        if (dyn.residuals_share[w] > dyn.innovations_share[w]) ok = false;
        max_gap = std::max(max_gap, dyn.innovations_share[w] - dyn.residuals_share[w]);
    }
    std::ostringstream os;
    os << dyn.innovations_share.size() << " windows, k=" << dyn.k_fixed << ", max share gap "
       << max_gap;
    detail = os.str();
    return ok;
}

bool criterion_no_lookahead(std::string& detail) {
    Fixture fx = make_fixture(252, 99);
    auto cfg = fixture_config();
    cfg.collect_diagnostics = false;
    const auto base = backtest::run_backtest(fx.returns, fx.factors, cfg, 0.5);

    const int cut = 201;  // mid out-of-sample (anchors run 151..251)
    Fixture tampered = fx;
    for (int t = cut; t < 252; ++t) {
        tampered.returns.returns.row(t) = -2.5 * tampered.returns.returns.row(t);
        for (auto& fp : tampered.factors) {
            fp.values.row(t).setConstant(0.123);
        }
    }
    const auto after = backtest::run_backtest(tampered.returns, tampered.factors, cfg, 0.5);
    bool ok = true;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < base.ledger.rows.size(); ++i) {
        const int anchor = 151 + static_cast<int>(i);
        if (anchor >= cut) break;
        ++checked;
        const auto& ra = base.ledger.rows[i];
        const auto& rb = after.ledger.rows[i];
        if (ra.value != rb.value || ra.gross != rb.gross ||
            (ra.weights_after - rb.weights_after).cwiseAbs().maxCoeff() != 0.0) {
            ok = false;
        }
    }
    std::ostringstream os;
    os << checked << " pre-tamper rows bit-compared";
    detail = os.str();
    return ok && checked == 50;
}

}  // namespace

int main() {
    std::printf("fcvar acceptance suite\n");
    run(1, "pipeline determinism (fixture, 100 oos days, < 5 min)", criterion_determinism);
    run(2, "arma-garch recovery and bic selection", criterion_arma_garch_recovery);
    run(3, "robust regression oracle", criterion_robust_oracle);
    run(4, "gam penalized normal-equation oracle", criterion_gam_oracle);
    run(5, "nig em/density/sampler suite", criterion_nig_suite);
    run(6, "cvar lp grid optimality and alpha sweep", criterion_lp_optimality);
    run(7, "metric identities", criterion_metric_identities);
    run(8, "gam beats rlr on nonlinear truth (50 windows)", criterion_gam_vs_rlr);
    run(9, "factor residuals explain less variance (pca)", criterion_pca_residuals);
    run(10, "no look-ahead under future tampering", criterion_no_lookahead);
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criteria FAILED\n", g_failures);
    }
    return g_failures;
}
