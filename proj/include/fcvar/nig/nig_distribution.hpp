#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace fcvar::nig {

/// Multivariate normal inverse Gaussian in the E[Z]=1 parametrization:
///   X = mu + Z gamma + sqrt(Z) L W,  L L' = Sigma,
/// where Z ~ GIG(lambda=-1/2, chi(alpha_bar), psi(alpha_bar)) is scaled so
/// that E[Z] = 1 (for lambda = -1/2 this gives chi = psi = alpha_bar).
struct NigParams {
    double lambda = -0.5;  // fixed; the NIG member of the GH family
    double alpha_bar = 1.0;
    Eigen::VectorXd mu;
    Eigen::VectorXd gamma;
    Eigen::MatrixXd sigma;

    int dim() const { return static_cast<int>(mu.size()); }
};

/// Classic (alpha, beta, delta, mu, Delta) parameters recovered from the
/// E[Z]=1 set; Delta = Sigma, beta = Sigma^{-1} gamma.
struct ClassicNigParams {
    double alpha = 0.0;
    Eigen::VectorXd beta;
    double delta = 0.0;
    Eigen::VectorXd mu;
    Eigen::MatrixXd delta_mat;
    double chi = 0.0;  // GIG parameters implied by alpha_bar
    double psi = 0.0;
};

ClassicNigParams to_classic(const NigParams& p);

/// Log of the d-dimensional NIG density (includes the -1/2 log|Sigma| term).
/// Throws SingularDispersion when Sigma has no Cholesky factor.
double nig_log_density(const Eigen::VectorXd& x, const NigParams& p);

/// Batch version (one row per observation); parallel, slot-filled,
/// bit-identical across thread counts.
Eigen::VectorXd nig_log_density_batch(const Eigen::MatrixXd& rows, const NigParams& p);

/// n draws from GIG(-1/2, chi, psi) (an inverse Gaussian law) by the
/// transformation method. Fixed seed gives a bit-identical sequence.
std::vector<double> sample_gig(double chi, double psi, int n, std::uint64_t seed);

/// Mean of GIG(lambda, chi, psi) via the Bessel-ratio formula.
double gig_mean(double lambda, double chi, double psi);

/// n x d matrix of NIG draws. Draws are produced in fixed-size chunks with
/// per-chunk derived seeds, so serial and OpenMP execution are bit-identical.
Eigen::MatrixXd sample_nig(const NigParams& p, int n, std::uint64_t seed);

/// Text record: lambda, alpha_bar, mu, gamma, sigma row-major.
std::string to_record(const NigParams& p);
NigParams nig_from_record(const std::string& record);

}  // namespace fcvar::nig
