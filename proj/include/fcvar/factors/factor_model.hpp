#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fcvar/factors/gam.hpp"
#include "fcvar/factors/robust.hpp"

namespace fcvar::factors {

enum class FactorModelKind { none, rlr, gam };

std::string to_string(FactorModelKind kind);
FactorModelKind factor_model_from_string(const std::string& s);

/// One fitted factor regression: robust linear, additive spline, or the
/// pass-through used when no factor model is configured (residuals == h,
/// prediction == 0).
struct FactorFit {
    FactorModelKind kind = FactorModelKind::none;
    std::optional<RobustFit> rlr;
    std::optional<GamFit> gam;
    Eigen::VectorXd residuals;
};

struct FactorOptions {
    RobustConfig robust = RobustConfig::tukey();
    GamConfig gam;
};

FactorFit fit_factor_model(FactorModelKind kind, const Eigen::VectorXd& h,
                           const Eigen::MatrixXd& F, const FactorOptions& opts = {});

/// Conditional mean at one factor row (0 for the pass-through variant).
double predict(const FactorFit& fit, const Eigen::VectorXd& f_row);

struct Diagnostics {
    double adj_r2 = 0.0;
    double mae = 0.0;
    double bic = 0.0;
    double edf = 0.0;
    std::vector<bool> significant;
};

/// adj-R², mean absolute residual and BIC with k = effective parameters
/// (smoother trace for the GAM, K+1 for the robust fit, 0 for pass-through).
Diagnostics diagnostics(const FactorFit& fit, const Eigen::VectorXd& h, const Eigen::MatrixXd& F);

}  // namespace fcvar::factors
