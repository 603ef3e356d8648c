#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fcvar::ts {

/// ARMA(p,q)-GARCH(P,Q) orders, each in {0,1,2}. The two constants c1 (mean)
/// and c2 (variance) are always present.
struct ArmaGarchSpec {
    int p = 0;
    int q = 0;
    int P = 0;
    int Q = 0;

    int param_count() const { return 2 + p + q + P + Q; }
    bool valid() const {
        auto ok = [](int v) { return v >= 0 && v <= 2; };
        return ok(p) && ok(q) && ok(P) && ok(Q);
    }
    bool operator==(const ArmaGarchSpec&) const = default;
};

/// Fitted filter. Mean equation:
///   r_t = c1 + sum_j ar[j] r_{t-1-j} + eps_t + sum_k ma[k] eps_{t-1-k}
/// Variance equation:
///   sigma2_t = c2 + sum_j garch[j] sigma2_{t-1-j} + sum_k arch[k] eps2_{t-1-k}
/// Pre-sample values: eps = 0, sigma2 = sample variance, r = sample mean.
/// Invariants: c2 > 0; garch, arch >= 0 with sum < 1; AR and MA polynomials
/// have roots outside the unit circle (guaranteed by the fitting
/// reparametrization).
struct ArmaGarchFit {
    ArmaGarchSpec spec;
    double c1 = 0.0;
    std::array<double, 2> ar{0.0, 0.0};
    std::array<double, 2> ma{0.0, 0.0};
    double c2 = 0.0;
    std::array<double, 2> garch{0.0, 0.0};
    std::array<double, 2> arch{0.0, 0.0};

    Eigen::VectorXd sigma2;  // conditional variances
    Eigen::VectorXd eps;     // residuals
    Eigen::VectorXd h;       // standardized innovations eps/sigma
    double loglik = 0.0;
    double bic = 0.0;
    int n_obs = 0;

    // forecasting state (tail of the estimation sample)
    std::array<double, 2> last_returns{0.0, 0.0};  // r_T, r_{T-1}
    bool has_state = false;

    double stationarity_margin() const {
        return garch[0] + garch[1] + arch[0] + arch[1];
    }
};

struct FitOptions {
    int restarts = 5;          // jittered moment-based starts
    double nm_tol = 1e-8;      // simplex convergence (objective improvement per cycle)
    int nm_max_evals = 0;      // 0 = 500 * dimension
    std::uint64_t jitter_seed = 0x3c6ef372fe94f82aULL;
};

/// Gaussian quasi-maximum-likelihood fit of one spec on a return series.
/// Throws ConstantSeries / OptimizerDiverged.
ArmaGarchFit fit_arma_garch(const Eigen::VectorXd& returns, const ArmaGarchSpec& spec,
                            const FitOptions& opts = {});

/// Fits all 81 order combinations (p,q,P,Q in {0,1,2}) and returns the
/// BIC-minimal fit. Failed fits are skipped; exact ties go to the smaller
/// parameter count, then lexicographic (p,q,P,Q). A winner whose stationarity
/// margin exceeds 0.999 is replaced by the best fit with margin <= 0.999.
/// Throws AllFitsFailed when nothing converges.
ArmaGarchFit select_model_bic(const Eigen::VectorXd& returns, const FitOptions& opts = {});

/// Schwarz criterion k*ln(n) - 2*loglik.
double bic(double loglik, int k, int n);

/// One-step-ahead conditional variance from the variance recursion.
double forecast_sigma2(const ArmaGarchFit& fit);

/// One-step-ahead conditional mean (the forecast with zero innovation).
double forecast_mean(const ArmaGarchFit& fit);

/// Simulated one-step-ahead return: mean + sigma_{T+1} * h_sim.
/// Throws MissingState if the fit carries no in-sample state.
double forecast_one_step(const ArmaGarchFit& fit, double h_sim);

/// Numerical-Hessian asymptotic standard errors in the natural parameter
/// order (c1, ar.., ma.., c2, garch.., arch..).
Eigen::VectorXd param_stderr(const ArmaGarchFit& fit, const Eigen::VectorXd& returns);

/// Key-value text record (orders, coefficients, loglik, bic, n_obs). Records
/// do not carry the in-sample state, so fits parsed back from a record can
/// not forecast.
std::string to_record(const ArmaGarchFit& fit);
ArmaGarchFit fit_from_record(const std::string& record);

}  // namespace fcvar::ts
