#include "fcvar/factors/robust.hpp"

#include <algorithm>
#include <cmath>

#include "fcvar/core/errors.hpp"

namespace fcvar::factors {

LossValue robust_loss(double x, const RobustConfig& cfg) {
    const double k = cfg.kappa;
    LossValue v{};
    if (cfg.loss == RobustLoss::huber) {
        if (std::fabs(x) <= k) {
            v.rho = 0.5 * x * x;
            v.psi = x;
            v.weight = 1.0;
        } else {
            v.rho = k * std::fabs(x) - 0.5 * k * k;
            v.psi = x > 0 ? k : -k;
            v.weight = k / std::fabs(x);
        }
    } else {
        if (std::fabs(x) <= k) {
            const double u = 1.0 - (x * x) / (k * k);
            v.rho = k * k / 6.0 * (1.0 - u * u * u);
            v.psi = x * u * u;
            v.weight = u * u;
        } else {
            v.rho = k * k / 6.0;
            v.psi = 0.0;
            v.weight = 0.0;
        }
    }
    return v;
}

double mad_scale(const Eigen::VectorXd& residuals) {
    const Eigen::Index n = residuals.size();
    if (n < 2) throw InsufficientRows("mad_scale: need at least 2 values");
    std::vector<double> v(residuals.data(), residuals.data() + n);
    auto median_of = [](std::vector<double>& x) {
        const std::size_t m = x.size() / 2;
        std::nth_element(x.begin(), x.begin() + m, x.end());
        double hi = x[m];
        if (x.size() % 2 == 0) {
            const double lo = *std::max_element(x.begin(), x.begin() + m);
            return 0.5 * (lo + hi);
        }
        return hi;
    };
    const double med = median_of(v);
    for (auto& x : v) x = std::fabs(x - med);
    return median_of(v) / 0.6745;
}

namespace {

Eigen::VectorXd weighted_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& w) {
    const Eigen::VectorXd sw = w.cwiseSqrt();
    const Eigen::MatrixXd Xw = sw.asDiagonal() * X;
    const Eigen::VectorXd yw = sw.asDiagonal() * y;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
    if (qr.rank() < X.cols()) {
        throw SingularDesign("fit_rlr: weighted design is rank deficient");
    }
    return qr.solve(yw);
}

}  // namespace

RobustFit fit_rlr(const Eigen::VectorXd& h, const Eigen::MatrixXd& F, const RobustConfig& cfg) {
    const Eigen::Index n = h.size();
    const Eigen::Index K = F.cols();
    if (F.rows() != n) throw MisalignedSeries("fit_rlr: h and F row counts differ");
    if (n <= K + 1) throw InsufficientRows("fit_rlr: need more rows than coefficients");

    Eigen::MatrixXd X(n, K + 1);
    X.col(0).setOnes();
    X.rightCols(K) = F;

    Eigen::VectorXd beta = weighted_solve(X, h, Eigen::VectorXd::Ones(n));  // OLS start

    RobustFit fit;
    fit.weights = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd resid = h - X * beta;

    const double h_scale = 1.0 + h.cwiseAbs().maxCoeff();
    for (int it = 1; it <= cfg.max_iter; ++it) {
        fit.iterations = it;
        const double s = mad_scale(resid);
        if (s <= 1e-12 * h_scale) {
            fit.zero_scale = true;  // exact fit to machine precision
            break;
        }
        double obj_before = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto lv = robust_loss(resid[i] / s, cfg);
            fit.weights[i] = lv.weight;
            obj_before += lv.rho;
        }
        const Eigen::VectorXd beta_new = weighted_solve(X, h, fit.weights);
        resid = h - X * beta_new;
        double obj_after = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) obj_after += robust_loss(resid[i] / s, cfg).rho;
        fit.objective_trace.emplace_back(obj_before, obj_after);

        const double delta = (beta_new - beta).cwiseAbs().maxCoeff();
        beta = beta_new;
        if (delta < cfg.tol) break;
    }

    fit.intercept = beta[0];
    fit.coefs = beta.tail(K);
    fit.residuals = resid;
    fit.scale = mad_scale(resid);

    // approximate per-factor significance flags from the weighted-LS covariance
    fit.significant.assign(static_cast<std::size_t>(K), false);
    const Eigen::MatrixXd G = X.transpose() * fit.weights.asDiagonal() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() == Eigen::Success) {
        const double dof = static_cast<double>(n - K - 1);
        const double s2 = (fit.weights.array() * resid.array().square()).sum() / dof;
        const Eigen::MatrixXd cov = s2 * ldlt.solve(Eigen::MatrixXd::Identity(K + 1, K + 1));
        for (Eigen::Index k = 0; k < K; ++k) {
            const double se = std::sqrt(std::max(cov(k + 1, k + 1), 0.0));
            if (se > 0.0) fit.significant[k] = std::fabs(beta[k + 1] / se) > 1.96;
        }
    }
    return fit;
}

double predict_rlr(const RobustFit& fit, const Eigen::VectorXd& f_row) {
    return fit.intercept + fit.coefs.dot(f_row);
}

}  // namespace fcvar::factors
