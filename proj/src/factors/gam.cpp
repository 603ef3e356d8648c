#include "fcvar/factors/gam.hpp"

#include <cmath>
#include <limits>

#include "fcvar/core/errors.hpp"
#include "fcvar/core/parallel.hpp"
#include "fcvar/core/special.hpp"

namespace fcvar::factors {

namespace {

struct SolveResult {
    Eigen::VectorXd z;
    double rss = 0.0;
    double edf_total = 0.0;
    Eigen::VectorXd edf_smooth;
    double gcv = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd a_inv_diag_blocks;  // unused placeholder
};

struct GamWork {
    Eigen::MatrixXd X;    // n x m
    Eigen::MatrixXd XtX;  // m x m
    Eigen::VectorXd Xth;
    Eigen::MatrixXd P;    // q x q difference penalty
    int n = 0, K = 0, q = 0, m = 0;

    Eigen::MatrixXd penalty(const Eigen::VectorXd& lams) const {
        Eigen::MatrixXd pen = Eigen::MatrixXd::Zero(m, m);
        for (int k = 0; k < K; ++k) {
            pen.block(1 + k * q, 1 + k * q, q, q) = lams[k] * P;
        }
        return pen;
    }

    SolveResult solve(const Eigen::VectorXd& lams, const Eigen::VectorXd& h, bool per_smooth) const {
        SolveResult r;
        const Eigen::MatrixXd pen = penalty(lams);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(XtX + pen);
        if (ldlt.info() != Eigen::Success) {
            throw SingularSystem("fit_gam: penalized normal equations are singular");
        }
        r.z = ldlt.solve(Xth);
        const Eigen::VectorXd fitted = X * r.z;
        r.rss = (h - fitted).squaredNorm();
        // edf_i = diag(A^{-1} X'X) = 1 - diag(A^{-1} Pen)
        const Eigen::MatrixXd Y = ldlt.solve(pen);
        r.edf_total = static_cast<double>(m) - Y.trace();
        if (per_smooth) {
            r.edf_smooth = Eigen::VectorXd::Zero(K);
            for (int k = 0; k < K; ++k) {
                double e = 0.0;
                for (int j = 0; j < q; ++j) {
                    const int idx = 1 + k * q + j;
                    e += 1.0 - Y(idx, idx);
                }
                r.edf_smooth[k] = e;
            }
        }
        const double denom = static_cast<double>(n) - r.edf_total;
        r.gcv = denom > 0.0 ? static_cast<double>(n) * r.rss / (denom * denom)
                            : std::numeric_limits<double>::infinity();
        return r;
    }
};

}  // namespace

GamFit fit_gam(const Eigen::VectorXd& h, const Eigen::MatrixXd& F, const GamConfig& cfg) {
    const int n = static_cast<int>(h.size());
    const int K = static_cast<int>(F.cols());
    if (F.rows() != n) throw MisalignedSeries("fit_gam: h and F row counts differ");
    if (K < 1) throw InvalidParameter("fit_gam: need at least one factor");
    if ((F.array() < 0.0).any() || (F.array() > 1.0).any()) {
        throw DomainViolation("fit_gam: factor values must lie in [0,1]");
    }
    const int q = cfg.basis_dim;
    if (n <= K * q) throw InsufficientRows("fit_gam: need more rows than K * basis_dim");
    if (!cfg.lambdas.empty() && static_cast<int>(cfg.lambdas.size()) != K) {
        throw InvalidParameter("fit_gam: lambdas must have one entry per factor");
    }

    GamWork w;
    w.n = n;
    w.K = K;
    w.q = q;
    w.m = 1 + K * q;
    const SplineBasis basis = SplineBasis::cubic(q);
    w.P = second_difference_penalty(q);

    GamFit fit;
    fit.basis = basis;
    fit.col_means.resize(q, K);

    w.X.resize(n, w.m);
    w.X.col(0).setOnes();
    for (int k = 0; k < K; ++k) {
        Eigen::MatrixXd B(n, q);
        for (int i = 0; i < n; ++i) B.row(i) = bspline_basis(F(i, k), basis).transpose();
        const Eigen::RowVectorXd mean = B.colwise().mean();
        fit.col_means.col(k) = mean.transpose();
        w.X.middleCols(1 + k * q, q) = B.rowwise() - mean;
    }
    w.XtX = w.X.transpose() * w.X;
    w.Xth = w.X.transpose() * h;

    Eigen::VectorXd lams(K);
    if (!cfg.lambdas.empty()) {
        for (int k = 0; k < K; ++k) {
            if (!(cfg.lambdas[k] > 0.0)) throw InvalidParameter("fit_gam: lambdas must be > 0");
            lams[k] = cfg.lambdas[k];
        }
    } else {
        // GCV on a 13-point log grid per factor, one coordinate-wise sweep
        std::vector<double> grid(13);
        for (int g = 0; g < 13; ++g) grid[g] = std::pow(10.0, -4 + g);
        lams.setOnes();
        for (int k = 0; k < K; ++k) {
            std::vector<double> scores(grid.size());
            core::parallel_for(static_cast<std::ptrdiff_t>(grid.size()), [&](std::ptrdiff_t g) {
                Eigen::VectorXd trial = lams;
                trial[k] = grid[static_cast<std::size_t>(g)];
                try {
                    scores[static_cast<std::size_t>(g)] = w.solve(trial, h, false).gcv;
                } catch (const Error&) {
                    // a numerically bad candidate just loses the grid search
                    scores[static_cast<std::size_t>(g)] = std::numeric_limits<double>::infinity();
                }
            });
            std::size_t best = 0;
            for (std::size_t g = 1; g < scores.size(); ++g) {
                if (scores[g] < scores[best]) best = g;
            }
            lams[k] = grid[best];
        }
    }

    const SolveResult r = w.solve(lams, h, true);
    fit.intercept = r.z[0];
    fit.coefs.resize(q, K);
    for (int k = 0; k < K; ++k) fit.coefs.col(k) = r.z.segment(1 + k * q, q);
    fit.lambdas = lams;
    fit.edf_smooth = r.edf_smooth;
    fit.edf_total = r.edf_total;
    fit.fitted = w.X * r.z;
    fit.residuals = h - fit.fitted;
    fit.gcv = r.gcv;

    // approximate Wald flags per smooth from the penalized covariance
    fit.significant.assign(static_cast<std::size_t>(K), false);
    const double denom = std::max(1.0, static_cast<double>(n) - r.edf_total);
    const double s2 = r.rss / denom;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(w.XtX + w.penalty(lams));
    const Eigen::MatrixXd cov = s2 * ldlt.solve(Eigen::MatrixXd::Identity(w.m, w.m));
    for (int k = 0; k < K; ++k) {
        const Eigen::MatrixXd Vk = cov.block(1 + k * q, 1 + k * q, q, q);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Vk);
        Eigen::VectorXd ev = es.eigenvalues();
        const double floor = 1e-12 * std::max(1.0, ev.maxCoeff());
        Eigen::VectorXd zk = es.eigenvectors().transpose() * fit.coefs.col(k);
        double stat = 0.0;
        for (int j = 0; j < q; ++j) {
            if (ev[j] > floor) stat += zk[j] * zk[j] / ev[j];
        }
        const double dof = std::max(1.0, r.edf_smooth[k]);
        fit.significant[static_cast<std::size_t>(k)] = core::chisq_sf(stat, dof) < 0.05;
    }
    return fit;
}

double predict_gam(const GamFit& fit, const Eigen::VectorXd& f_row) {
    const int K = static_cast<int>(fit.coefs.cols());
    if (f_row.size() != K) throw MisalignedSeries("predict_gam: factor row length mismatch");
    double y = fit.intercept;
    for (int k = 0; k < K; ++k) {
        const double x = std::min(1.0, std::max(0.0, f_row[k]));
        const Eigen::VectorXd b = bspline_basis(x, fit.basis) - fit.col_means.col(k);
        y += b.dot(fit.coefs.col(k));
    }
    return y;
}

}  // namespace fcvar::factors
