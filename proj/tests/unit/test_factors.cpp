#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "../testutil/synthetic.hpp"
#include "fcvar/core/errors.hpp"
#include "fcvar/core/rng.hpp"
#include "fcvar/factors/factor_model.hpp"
#include "fcvar/factors/gam.hpp"
#include "fcvar/factors/robust.hpp"
#include "fcvar/factors/spline.hpp"

using namespace fcvar;
using factors::FactorModelKind;
using factors::GamConfig;
using factors::RobustConfig;

TEST_CASE("robust_loss: origin, tukey branches, huber weights") {
    const auto tukey = RobustConfig::tukey();
    const auto at0 = factors::robust_loss(0.0, tukey);
    CHECK(at0.rho == doctest::Approx(0.0));
    CHECK(at0.psi == doctest::Approx(0.0));
    CHECK(at0.weight == doctest::Approx(1.0));

    const double k = tukey.kappa;
    const auto beyond = factors::robust_loss(2.0 * k, tukey);
    CHECK(beyond.rho == doctest::Approx(k * k / 6.0));
    CHECK(beyond.psi == doctest::Approx(0.0));
    CHECK(beyond.weight == doctest::Approx(0.0));

    // psi(k/2) = (k/2)(1 - 1/4)^2 = 9k/32
    const auto half = factors::robust_loss(k / 2.0, tukey);
    CHECK(half.psi == doctest::Approx(9.0 * k / 32.0).epsilon(1e-12));

    const auto huber = RobustConfig::huber();
    const auto far = factors::robust_loss(10.0, huber);
    CHECK(far.weight == doctest::Approx(huber.kappa / 10.0));
    CHECK(far.rho == doctest::Approx(huber.kappa * 10.0 - 0.5 * huber.kappa * huber.kappa));
}

TEST_CASE("mad_scale: hand values and consistency") {
    Eigen::VectorXd v(3);
    v << -1, 0, 1;
    CHECK(factors::mad_scale(v) == doctest::Approx(1.0 / 0.6745).epsilon(1e-12));
    const auto z = testutil::gaussian_series(10000, 0.0, 1.0, 21);
    CHECK(factors::mad_scale(z) == doctest::Approx(1.0).epsilon(0.05));
    Eigen::VectorXd one(1);
    one << 2.0;
    CHECK_THROWS_AS(factors::mad_scale(one), InsufficientRows);
}

TEST_CASE("fit_rlr: exact linear data recovered to 1e-10") {
    const auto F = testutil::uniform_matrix(120, 3, 3);
    Eigen::VectorXd b(3);
    b << 0.4, -0.2, 0.1;
    const Eigen::VectorXd h = 0.05 + (F * b).array();
    const auto fit = factors::fit_rlr(h, F, RobustConfig::tukey());
    CHECK(fit.intercept == doctest::Approx(0.05).epsilon(1e-10));
    for (int j = 0; j < 3; ++j) CHECK(fit.coefs[j] == doctest::Approx(b[j]).epsilon(1e-10));
    CHECK(fit.zero_scale);
}

TEST_CASE("fit_rlr: huber with huge kappa equals the OLS oracle") {
    for (int rep = 0; rep < 5; ++rep) {
        const auto F = testutil::uniform_matrix(150, 2, 100 + rep);
        const auto noise = testutil::gaussian_series(150, 0.0, 0.3, 200 + rep);
        const Eigen::VectorXd h = (F * Eigen::Vector2d(0.8, -0.5)).array() + 0.1 + noise.array();
        RobustConfig cfg = RobustConfig::huber();
        cfg.kappa = 1e9;
        const auto fit = factors::fit_rlr(h, F, cfg);
        const auto oracle = testutil::ols_oracle(h, F);
        CHECK(fit.intercept == doctest::Approx(oracle[0]).epsilon(1e-8));
        CHECK(fit.coefs[0] == doctest::Approx(oracle[1]).epsilon(1e-8));
        CHECK(fit.coefs[1] == doctest::Approx(oracle[2]).epsilon(1e-8));
    }
}

TEST_CASE("fit_rlr: tukey zeroes a gross outlier") {
    const int n = 200;
    const auto F = testutil::uniform_matrix(n, 2, 7);
    const auto noise = testutil::gaussian_series(n, 0.0, 0.01, 8);
    Eigen::VectorXd h = (F * Eigen::Vector2d(0.6, -0.3)).array() + 0.2 + noise.array();
    const Eigen::VectorXd h_clean = h;
    h[42] += 100.0 * 0.01;  // 100 sigma outlier
    const auto fit = factors::fit_rlr(h, F, RobustConfig::tukey());
    CHECK(fit.weights[42] == doctest::Approx(0.0));
    const auto oracle = testutil::ols_oracle(h_clean, F);
    CHECK(fit.intercept == doctest::Approx(oracle[0]).epsilon(1e-3));
    CHECK(fit.coefs[0] == doctest::Approx(oracle[1]).epsilon(1e-3));
    CHECK(fit.coefs[1] == doctest::Approx(oracle[2]).epsilon(1e-3));
}

TEST_CASE("fit_rlr: irls descends and satisfies the estimating equations") {
    const auto F = testutil::uniform_matrix(180, 2, 17);
    auto noise = testutil::gaussian_series(180, 0.0, 0.05, 18);
    noise[3] += 1.0;
    noise[90] -= 0.7;  // some outliers
    const Eigen::VectorXd h = (F * Eigen::Vector2d(0.3, 0.4)).array() + noise.array();
    const auto cfg = RobustConfig::tukey();
    const auto fit = factors::fit_rlr(h, F, cfg);
    for (const auto& [before, after] : fit.objective_trace) {
        CHECK(after <= before + 1e-9);
    }
    // weighted residuals orthogonal to the design at convergence
    Eigen::MatrixXd X(F.rows(), 3);
    X.col(0).setOnes();
    X.rightCols(2) = F;
    const Eigen::VectorXd grad = X.transpose() * (fit.weights.asDiagonal() * fit.residuals);
    CHECK(grad.cwiseAbs().maxCoeff() < 1e-6);
    for (int i = 0; i < fit.weights.size(); ++i) {
        CHECK(fit.weights[i] >= 0.0);
        CHECK(fit.weights[i] <= 1.0);
    }
}

TEST_CASE("bspline: partition of unity at random points") {
    const auto basis = factors::SplineBasis::cubic(10);
    core::Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform();
        const Eigen::VectorXd v = factors::bspline_basis(x, basis);
        CHECK(std::fabs(v.sum() - 1.0) < 1e-12);
        int nonzero = 0;
        for (int j = 0; j < v.size(); ++j) {
            if (v[j] != 0.0) ++nonzero;
        }
        CHECK(nonzero <= 4);
    }
    CHECK(std::fabs(factors::bspline_basis(0.0, basis).sum() - 1.0) < 1e-12);
    CHECK(std::fabs(factors::bspline_basis(1.0, basis).sum() - 1.0) < 1e-12);
    CHECK_THROWS_AS(factors::bspline_basis(1.5, basis), OutOfDomain);
}

TEST_CASE("bspline: degree-0 indicator and cubic symmetry") {
    const auto flat = factors::SplineBasis::uniform(4, 0);
    const Eigen::VectorXd at = factors::bspline_basis(0.3, flat);
    CHECK(at.sum() == doctest::Approx(1.0));
    CHECK(at[1] == doctest::Approx(1.0));  // x in [0.25, 0.5)

    const auto cubic = factors::SplineBasis::cubic(10);
    const Eigen::VectorXd mid = factors::bspline_basis(0.5, cubic);
    for (int j = 0; j < 10; ++j) {
        CHECK(mid[j] == doctest::Approx(mid[9 - j]).epsilon(1e-12));
    }
}

TEST_CASE("fit_gam: fixed-lambda solution equals the penalized normal equations") {
    const int n = 150, K = 2, q = 8;
    const auto F = testutil::uniform_matrix(n, K, 44);
    const auto noise = testutil::gaussian_series(n, 0.0, 0.1, 45);
    Eigen::VectorXd h(n);
    for (int i = 0; i < n; ++i) {
        h[i] = std::sin(6.28318 * F(i, 0)) + 0.5 * F(i, 1) + noise[i];
    }
    GamConfig cfg;
    cfg.basis_dim = q;
    cfg.lambdas = {3.0, 10.0};
    const auto fit = factors::fit_gam(h, F, cfg);

    // oracle: build the same centered design explicitly and solve
    const auto basis = factors::SplineBasis::cubic(q);
    Eigen::MatrixXd X(n, 1 + K * q);
    X.col(0).setOnes();
    for (int k = 0; k < K; ++k) {
        Eigen::MatrixXd B(n, q);
        for (int i = 0; i < n; ++i) B.row(i) = factors::bspline_basis(F(i, k), basis).transpose();
        X.middleCols(1 + k * q, q) = B.rowwise() - B.colwise().mean();
    }
    Eigen::MatrixXd pen = Eigen::MatrixXd::Zero(1 + K * q, 1 + K * q);
    const Eigen::MatrixXd P = factors::second_difference_penalty(q);
    pen.block(1, 1, q, q) = 3.0 * P;
    pen.block(1 + q, 1 + q, q, q) = 10.0 * P;
    const Eigen::VectorXd z = (X.transpose() * X + pen).ldlt().solve(X.transpose() * h);

    CHECK(fit.intercept == doctest::Approx(z[0]).epsilon(1e-8));
    for (int k = 0; k < K; ++k) {
        for (int j = 0; j < q; ++j) {
            CHECK(fit.coefs(j, k) == doctest::Approx(z[1 + k * q + j]).epsilon(1e-8));
        }
    }
}

TEST_CASE("fit_gam: huge lambda collapses to the affine fit") {
    const int n = 200, K = 2;
    const auto F = testutil::uniform_matrix(n, K, 50);
    const auto noise = testutil::gaussian_series(n, 0.0, 0.05, 51);
    const Eigen::VectorXd h = (F * Eigen::Vector2d(0.7, -0.4)).array() + 0.1 + noise.array();
    GamConfig cfg;
    cfg.lambdas = {1e12, 1e12};
    const auto fit = factors::fit_gam(h, F, cfg);
    const auto ols = testutil::ols_oracle(h, F);
    for (int i = 0; i < 25; ++i) {
        Eigen::VectorXd x = testutil::uniform_matrix(1, K, 600 + i).row(0).transpose();
        const double lin = ols[0] + ols[1] * x[0] + ols[2] * x[1];
        CHECK(factors::predict_gam(fit, x) == doctest::Approx(lin).epsilon(1e-4));
    }
}

TEST_CASE("fit_gam: auto lambda recovers a smooth signal") {
    const int n = 400;
    const auto F = testutil::uniform_matrix(n, 1, 60);
    const auto noise = testutil::gaussian_series(n, 0.0, 0.05, 61);
    Eigen::VectorXd h(n), truth(n);
    for (int i = 0; i < n; ++i) {
        truth[i] = std::sin(2.0 * M_PI * F(i, 0));
        h[i] = truth[i] + noise[i];
    }
    const auto fit = factors::fit_gam(h, F, GamConfig{});
    const double rmse = std::sqrt((fit.fitted - truth).squaredNorm() / n);
    CHECK(rmse <= 0.1);
}

TEST_CASE("fit_gam: fitted values linear in the response at fixed lambda") {
    const int n = 120;
    const auto F = testutil::uniform_matrix(n, 2, 70);
    const auto h1 = testutil::gaussian_series(n, 0.0, 1.0, 71);
    const auto h2 = testutil::gaussian_series(n, 0.0, 1.0, 72);
    GamConfig cfg;
    cfg.lambdas = {2.0, 5.0};
    const auto fa = factors::fit_gam(h1, F, cfg);
    const auto fb = factors::fit_gam(h2, F, cfg);
    const Eigen::VectorXd mix = 0.3 * h1 + 0.7 * h2;
    const auto fm = factors::fit_gam(mix, F, cfg);
    const Eigen::VectorXd expect = 0.3 * fa.fitted + 0.7 * fb.fitted;
    CHECK((fm.fitted - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit_gam: smooths are centered, prediction matches fitted values") {
    const int n = 150;
    const auto F = testutil::uniform_matrix(n, 2, 80);
    Eigen::VectorXd h(n);
    for (int i = 0; i < n; ++i) h[i] = std::cos(4.0 * F(i, 0)) + F(i, 1) * F(i, 1);
    GamConfig cfg;
    cfg.lambdas = {0.5, 0.5};
    const auto fit = factors::fit_gam(h, F, cfg);
    // per-factor smooth sums to ~0 over training rows
    for (int k = 0; k < 2; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd b =
                factors::bspline_basis(F(i, k), fit.basis) - fit.col_means.col(k);
            acc += b.dot(fit.coefs.col(k));
        }
        CHECK(std::fabs(acc / n) < 1e-8);
    }
    for (int i = 0; i < 10; ++i) {
        CHECK(factors::predict_gam(fit, F.row(i).transpose()) ==
              doctest::Approx(fit.fitted[i]).epsilon(1e-10));
    }
    CHECK_THROWS_AS(
        factors::fit_gam(h, (F.array() + 2.0).matrix(), cfg), DomainViolation);
}

TEST_CASE("factor model: pass-through, prediction, diagnostics") {
    const auto F = testutil::uniform_matrix(100, 2, 90);
    const auto h = testutil::gaussian_series(100, 0.0, 1.0, 91);
    const auto none = factors::fit_factor_model(FactorModelKind::none, h, F);
    CHECK((none.residuals - h).cwiseAbs().maxCoeff() == 0.0);
    CHECK(factors::predict(none, F.row(0).transpose()) == 0.0);

    factors::FactorFit rlr;
    rlr.kind = FactorModelKind::rlr;
    rlr.rlr = factors::RobustFit{};
    rlr.rlr->intercept = 0.1;
    rlr.rlr->coefs = Eigen::Vector2d(0.2, -0.3);
    CHECK(factors::predict(rlr, Eigen::Vector2d(0.5, 0.5)) == doctest::Approx(0.05));

    // perfect fit -> adj r2 = 1, mae = 0
    const Eigen::VectorXd lin = (F * Eigen::Vector2d(0.3, 0.1)).array() + 0.2;
    const auto fit = factors::fit_factor_model(FactorModelKind::rlr, lin, F);
    const auto diag = factors::diagnostics(fit, lin, F);
    CHECK(diag.adj_r2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(diag.mae == doctest::Approx(0.0).epsilon(1e-10));

    // useless factors -> adj r2 near zero
    const auto fit0 = factors::fit_factor_model(FactorModelKind::rlr, h, F);
    const auto diag0 = factors::diagnostics(fit0, h, F);
    CHECK(std::fabs(diag0.adj_r2) < 0.15);

    // gam prediction at a training point equals its fitted value
    GamConfig gcfg;
    gcfg.lambdas = {1.0, 1.0};
    factors::FactorOptions opts;
    opts.gam = gcfg;
    const auto gfit = factors::fit_factor_model(FactorModelKind::gam, h, F, opts);
    CHECK(factors::predict(gfit, F.row(5).transpose()) ==
          doctest::Approx(gfit.gam->fitted[5]).epsilon(1e-10));
}

TEST_CASE("factor model: gam beats rlr on nonlinear truth (window median)") {
    // small-scale version of the figure-style comparison
    std::vector<double> gam_r2, rlr_r2;
    for (int w = 0; w < 10; ++w) {
        const int n = 160;
        const auto F = testutil::uniform_matrix(n, 2, 700 + w);
        const auto noise = testutil::gaussian_series(n, 0.0, 0.15, 800 + w);
        Eigen::VectorXd h(n);
        for (int i = 0; i < n; ++i) {
            h[i] = std::sin(2.0 * M_PI * F(i, 0)) + std::cos(2.0 * M_PI * F(i, 1)) + noise[i];
        }
        const auto g = factors::fit_factor_model(FactorModelKind::gam, h, F);
        const auto r = factors::fit_factor_model(FactorModelKind::rlr, h, F);
        gam_r2.push_back(factors::diagnostics(g, h, F).adj_r2);
        rlr_r2.push_back(factors::diagnostics(r, h, F).adj_r2);
    }
    std::sort(gam_r2.begin(), gam_r2.end());
    std::sort(rlr_r2.begin(), rlr_r2.end());
    CHECK(gam_r2[5] > rlr_r2[5]);
}
