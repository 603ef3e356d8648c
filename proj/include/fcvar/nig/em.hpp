#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fcvar/nig/nig_distribution.hpp"

namespace fcvar::nig {

/// Conditional GIG expectations given each observation: E[Z|x], E[1/Z|x],
/// E[log Z|x]. Jensen: e_z * e_inv >= 1 pointwise.
struct GigMoments {
    Eigen::VectorXd e_z;
    Eigen::VectorXd e_inv;
    Eigen::VectorXd e_log;
};

struct EmTrace {
    std::vector<double> loglik;       // per accepted iteration
    std::vector<NigParams> params;    // snapshot per iteration
    bool converged = false;
    int iterations = 0;
};

struct EmOptions {
    double tol = 1e-7;   // relative log-likelihood change
    int max_iter = 500;  // exceeded -> best-so-far returned with converged=false
};

/// E-step moments at the current parameters.
GigMoments gig_conditional_moments(const Eigen::MatrixXd& data, const NigParams& p);

/// EM estimation of the multivariate NIG in the E[Z]=1 parametrization.
/// Initialization: mu = sample mean, gamma = 0, sigma = sample covariance,
/// alpha_bar = 1. M-step: mu, gamma, sigma in closed form; alpha_bar by
/// golden-section search on log alpha_bar over [1e-3, 1e3].
/// The seed parameter is part of the interface for stochastic variants;
/// the implemented EM is deterministic and does not consume it.
/// Throws RankDeficientData. MaxIterExceeded is reported via the trace flag,
/// not an exception.
std::pair<NigParams, EmTrace> fit_nig_em(const Eigen::MatrixXd& data, const EmOptions& opts = {},
                                         std::uint64_t seed = 0);

}  // namespace fcvar::nig
