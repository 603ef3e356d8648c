#include "fcvar/factors/factor_model.hpp"

#include <cmath>

#include "fcvar/core/errors.hpp"

namespace fcvar::factors {

std::string to_string(FactorModelKind kind) {
    switch (kind) {
        case FactorModelKind::none: return "none";
        case FactorModelKind::rlr: return "rlr";
        case FactorModelKind::gam: return "gam";
    }
    return "none";
}

FactorModelKind factor_model_from_string(const std::string& s) {
    if (s == "none") return FactorModelKind::none;
    if (s == "rlr") return FactorModelKind::rlr;
    if (s == "gam") return FactorModelKind::gam;
    throw ConfigError("unknown factor model `" + s + "` (expected none|rlr|gam)");
}

FactorFit fit_factor_model(FactorModelKind kind, const Eigen::VectorXd& h,
                           const Eigen::MatrixXd& F, const FactorOptions& opts) {
    FactorFit fit;
    fit.kind = kind;
    switch (kind) {
        case FactorModelKind::none:
            fit.residuals = h;
            break;
        case FactorModelKind::rlr:
            fit.rlr = fit_rlr(h, F, opts.robust);
            fit.residuals = fit.rlr->residuals;
            break;
        case FactorModelKind::gam:
            fit.gam = fit_gam(h, F, opts.gam);
            fit.residuals = fit.gam->residuals;
            break;
    }
    return fit;
}

double predict(const FactorFit& fit, const Eigen::VectorXd& f_row) {
    switch (fit.kind) {
        case FactorModelKind::none: return 0.0;
        case FactorModelKind::rlr: return predict_rlr(*fit.rlr, f_row);
        case FactorModelKind::gam: return predict_gam(*fit.gam, f_row);
    }
    return 0.0;
}

Diagnostics diagnostics(const FactorFit& fit, const Eigen::VectorXd& h,
                        const Eigen::MatrixXd& /*F: kept for the op signature*/) {
    const double n = static_cast<double>(h.size());
    Diagnostics d;
    switch (fit.kind) {
        case FactorModelKind::none:
            d.edf = 0.0;
            break;
        case FactorModelKind::rlr:
            d.edf = static_cast<double>(fit.rlr->coefs.size()) + 1.0;
            d.significant = std::vector<bool>(fit.rlr->significant.begin(),
                                              fit.rlr->significant.end());
            break;
        case FactorModelKind::gam:
            d.edf = fit.gam->edf_total;
            d.significant = std::vector<bool>(fit.gam->significant.begin(),
                                              fit.gam->significant.end());
            break;
    }
    const Eigen::VectorXd& xi = fit.residuals;
    const double rss = xi.squaredNorm();
    const double mean_h = h.mean();
    const double tss = (h.array() - mean_h).square().sum();
    const double dfe = n - d.edf;
    if (tss > 0.0 && dfe >= 1.0 && n > 1.0) {
        d.adj_r2 = 1.0 - (rss / dfe) / (tss / (n - 1.0));
    } else {
        d.adj_r2 = rss <= 1e-30 ? 1.0 : 0.0;
    }
    d.mae = xi.cwiseAbs().mean();
    const double sigma2 = std::max(rss / n, 1e-300);
    const double loglik = -0.5 * n * (std::log(2.0 * M_PI * sigma2) + 1.0);
    d.bic = d.edf * std::log(n) - 2.0 * loglik;
    return d;
}

}  // namespace fcvar::factors
