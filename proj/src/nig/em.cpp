#include "fcvar/nig/em.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "fcvar/core/errors.hpp"
#include "fcvar/core/parallel.hpp"
#include "fcvar/nig/bessel.hpp"

namespace fcvar::nig {

namespace {

// Nudges the diagonal until a Cholesky factor exists (near-degenerate panels).
void ensure_pd(Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    double reg = 1e-10 * sigma.trace() / static_cast<double>(sigma.rows());
    int tries = 0;
    while (llt.info() != Eigen::Success && tries < 6) {
        sigma.diagonal().array() += reg;
        llt.compute(sigma);
        reg *= 10.0;
        ++tries;
    }
    if (llt.info() != Eigen::Success) {
        throw SingularDispersion("fit_nig_em: covariance update is not positive definite");
    }
}

// Expected GIG log-likelihood (the alpha_bar part of the Q function), per
// observation means of E[Z], E[1/Z], E[log Z] given. chi/psi are tied to
// alpha_bar by the E[Z]=1 constraint.
double q_gig(double log_abar, double lambda, double m_z, double m_inv, double m_log) {
    const double abar = std::exp(log_abar);
    const double log_ratio = log_bessel_k(lambda + 1.0, abar) - log_bessel_k(lambda, abar);
    const double chi = abar * std::exp(-log_ratio);
    const double psi = abar * std::exp(log_ratio);
    return 0.5 * lambda * (std::log(psi) - std::log(chi)) - std::log(2.0) -
           log_bessel_k(lambda, abar) + (lambda - 1.0) * m_log -
           0.5 * (chi * m_inv + psi * m_z);
}

double golden_max(double lo, double hi, const std::function<double(double)>& f) {
    const double gr = 0.61803398874989484820;
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

GigMoments gig_conditional_moments(const Eigen::MatrixXd& data, const NigParams& p) {
    const int n = static_cast<int>(data.rows());
    const int d = p.dim();
    const ClassicNigParams cp = to_classic(p);
    Eigen::LLT<Eigen::MatrixXd> llt(p.sigma);
    if (llt.info() != Eigen::Success) {
        throw SingularDispersion("gig_conditional_moments: sigma not positive definite");
    }
    const double psi_gamma = cp.psi + cp.beta.dot(p.gamma);  // psi + gamma' Sigma^-1 gamma
    const double lam_post = p.lambda - 0.5 * static_cast<double>(d);

    GigMoments m;
    m.e_z.resize(n);
    m.e_inv.resize(n);
    m.e_log.resize(n);
    core::parallel_for(n, [&](std::ptrdiff_t i) {
        const Eigen::VectorXd centered = data.row(i).transpose() - p.mu;
        const double quad = centered.dot(llt.solve(centered));
        const double a = cp.chi + quad;       // posterior chi
        const double b = psi_gamma;           // posterior psi
        const double omega = std::sqrt(a * b);
        const double log_r1 = log_bessel_k(lam_post + 1.0, omega) - log_bessel_k(lam_post, omega);
        const double r1 = std::exp(log_r1);
        const double sab = std::sqrt(a / b);
        m.e_z[i] = sab * r1;
        // K_{v-1}/K_v = K_{v+1}/K_v - 2v/omega
        m.e_inv[i] = (r1 - 2.0 * lam_post / omega) / sab;
        m.e_log[i] = 0.5 * (std::log(a) - std::log(b)) + dlog_bessel_k_dnu(lam_post, omega);
    });
    return m;
}

std::pair<NigParams, EmTrace> fit_nig_em(const Eigen::MatrixXd& data, const EmOptions& opts,
                                         std::uint64_t /*seed: reserved, EM is deterministic*/) {
    const int n = static_cast<int>(data.rows());
    const int d = static_cast<int>(data.cols());
    if (n <= d + 2) throw InsufficientRows("fit_nig_em: need n > dim + 2 observations");

    const Eigen::RowVectorXd mean = data.colwise().mean();
    const Eigen::MatrixXd centered = data.rowwise() - mean;
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(centered);
        if (qr.rank() < d) throw RankDeficientData("fit_nig_em: data has deficient column rank");
    }

    NigParams p;
    p.lambda = -0.5;
    p.alpha_bar = 1.0;
    p.mu = mean.transpose();
    p.gamma = Eigen::VectorXd::Zero(d);
    p.sigma = centered.transpose() * centered / static_cast<double>(n);
    ensure_pd(p.sigma);

    EmTrace trace;
    NigParams best = p;
    double best_ll = -std::numeric_limits<double>::infinity();
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int it = 1; it <= opts.max_iter; ++it) {
        // E-step
        const GigMoments m = gig_conditional_moments(data, p);

        // M-step: mu, gamma, sigma in closed form
        const double H = m.e_z.sum();
        const double D = m.e_inv.sum();
        const Eigen::VectorXd sx = data.transpose() * m.e_inv;  // sum e_inv_i x_i
        const Eigen::VectorXd xbar = mean.transpose();
        const double nn = static_cast<double>(n);
        const double denom = H * D - nn * nn;
        if (std::fabs(denom) > 1e-12 * nn * nn) {
            p.gamma = nn * (D * xbar - sx) / denom;
        } else {
            p.gamma.setZero();
        }
        p.mu = (sx - nn * p.gamma) / D;

        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd c = data.row(i).transpose() - p.mu;
            s.noalias() += m.e_inv[i] * c * c.transpose();
        }
        s /= nn;
        s.noalias() -= (H / nn) * p.gamma * p.gamma.transpose();
        ensure_pd(s);
        p.sigma = s;

        // M-step: alpha_bar by golden section on log scale
        const double m_z = H / nn, m_inv = D / nn, m_log = m.e_log.mean();
        const double log_abar = golden_max(std::log(1e-3), std::log(1e3), [&](double la) {
            return q_gig(la, p.lambda, m_z, m_inv, m_log);
        });
        p.alpha_bar = std::exp(log_abar);

        const double ll = nig_log_density_batch(data, p).sum();
        trace.loglik.push_back(ll);
        trace.params.push_back(p);
        trace.iterations = it;
        if (ll > best_ll) {
            best_ll = ll;
            best = p;
        }
        if (it > 1 && std::fabs(ll - prev_ll) <= opts.tol * (1.0 + std::fabs(prev_ll))) {
            trace.converged = true;
            break;
        }
        prev_ll = ll;
    }
    return {best, trace};
}

}  // namespace fcvar::nig
