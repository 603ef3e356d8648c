#include "fcvar/backtest/pca.hpp"

#include <algorithm>

#include "fcvar/core/errors.hpp"

namespace fcvar::backtest {

namespace {

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& panel) {
    const Eigen::Index n = panel.rows();
    const Eigen::RowVectorXd mean = panel.colwise().mean();
    const Eigen::MatrixXd centered = panel.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd ev = es.eigenvalues();  // ascending
    std::reverse(ev.data(), ev.data() + ev.size());
    return ev.cwiseMax(0.0);
}

}  // namespace

double top_k_share(const Eigen::MatrixXd& panel, int k) {
    const Eigen::VectorXd ev = sorted_eigenvalues(panel);
    const double total = ev.sum();
    if (!(total > 0.0)) return 1.0;
    k = std::min<int>(k, static_cast<int>(ev.size()));
    return ev.head(k).sum() / total;
}

PcaDynamics pca_explained_dynamics(const Eigen::MatrixXd& returns,
                                   const Eigen::MatrixXd& innovations,
                                   const Eigen::MatrixXd& residuals, int window, int stride,
                                   double target) {
    const Eigen::Index n = returns.rows();
    if (innovations.rows() != n || residuals.rows() != n) {
        throw MisalignedSeries("pca_explained_dynamics: panels must share the date axis");
    }
    if (window < 2 || window > n) throw WindowOutOfRange("pca_explained_dynamics: bad window");
    if (stride < 1) throw InvalidParameter("pca_explained_dynamics: stride must be >= 1");

    PcaDynamics out;
    {
        const Eigen::VectorXd ev = sorted_eigenvalues(returns.topRows(window));
        const double total = ev.sum();
        double acc = 0.0;
        out.k_fixed = static_cast<int>(ev.size());
        for (int k = 0; k < ev.size(); ++k) {
            acc += ev[k];
            if (total > 0.0 && acc / total >= target) {
                out.k_fixed = k + 1;
                break;
            }
        }
    }
    for (Eigen::Index anchor = window; anchor <= n; anchor += stride) {
        const Eigen::Index start = anchor - window;
        out.returns_share.push_back(top_k_share(returns.middleRows(start, window), out.k_fixed));
        out.innovations_share.push_back(
            top_k_share(innovations.middleRows(start, window), out.k_fixed));
        out.residuals_share.push_back(
            top_k_share(residuals.middleRows(start, window), out.k_fixed));
    }
    return out;
}

}  // namespace fcvar::backtest
