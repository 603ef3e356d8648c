#include "fcvar/nig/nig_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcvar/core/errors.hpp"
#include "fcvar/core/parallel.hpp"
#include "fcvar/core/rng.hpp"
#include "fcvar/nig/bessel.hpp"

namespace fcvar::nig {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_params(const NigParams& p) {
    if (!(p.alpha_bar > 0.0)) throw InvalidParameter("NigParams: alpha_bar must be > 0");
    if (p.gamma.size() != p.mu.size() || p.sigma.rows() != p.mu.size() ||
        p.sigma.cols() != p.mu.size()) {
        throw InvalidParameter("NigParams: inconsistent dimensions");
    }
}

Eigen::LLT<Eigen::MatrixXd> cholesky_or_throw(const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw SingularDispersion("NIG dispersion matrix is not positive definite");
    }
    return llt;
}

struct DensityContext {
    ClassicNigParams cp;
    Eigen::LLT<Eigen::MatrixXd> llt;
    double log_const = 0.0;  // all x-independent terms
    double nu = 0.0;         // Bessel order (d+1)/2

    explicit DensityContext(const NigParams& p) : cp(to_classic(p)), llt(cholesky_or_throw(p.sigma)) {
        const double d = static_cast<double>(p.dim());
        nu = 0.5 * (d + 1.0);
        const Eigen::MatrixXd L = llt.matrixL();
        double logdet = 0.0;
        for (int i = 0; i < p.dim(); ++i) logdet += 2.0 * std::log(L(i, i));
        // sqrt(2/pi) * delta * alpha^((d+1)/2) / (2 pi)^(d/2) * e^{delta sqrt(psi)} / sqrt|Delta|
        log_const = 0.5 * std::log(2.0 / M_PI) + std::log(cp.delta) + nu * std::log(cp.alpha) -
                    0.5 * d * kLog2Pi - 0.5 * logdet + cp.delta * std::sqrt(cp.psi);
    }

    double log_density(const Eigen::VectorXd& x) const {
        const Eigen::VectorXd centered = x - cp.mu;
        const Eigen::VectorXd solved = llt.solve(centered);
        const double quad = centered.dot(solved) + cp.delta * cp.delta;
        return log_const - 0.5 * nu * std::log(quad) +
               log_bessel_k(nu, cp.alpha * std::sqrt(quad)) + cp.beta.dot(centered);
    }
};

}  // namespace

ClassicNigParams to_classic(const NigParams& p) {
    check_params(p);
    ClassicNigParams c;
    // chi = abar K_l(abar)/K_{l+1}(abar), psi = abar K_{l+1}(abar)/K_l(abar);
    // the ratio is 1 for lambda = -1/2 but is kept general.
    const double ratio = std::exp(log_bessel_k(p.lambda + 1.0, p.alpha_bar) -
                                  log_bessel_k(p.lambda, p.alpha_bar));
    c.chi = p.alpha_bar / ratio;
    c.psi = p.alpha_bar * ratio;
    c.delta = std::sqrt(c.chi);
    c.mu = p.mu;
    c.delta_mat = p.sigma;
    c.beta = cholesky_or_throw(p.sigma).solve(p.gamma);
    c.alpha = std::sqrt(c.psi + c.beta.dot(p.gamma));
    return c;
}

double nig_log_density(const Eigen::VectorXd& x, const NigParams& p) {
    DensityContext ctx(p);
    return ctx.log_density(x);
}

Eigen::VectorXd nig_log_density_batch(const Eigen::MatrixXd& rows, const NigParams& p) {
    DensityContext ctx(p);
    Eigen::VectorXd out(rows.rows());
    core::parallel_for(rows.rows(), [&](std::ptrdiff_t i) {
        out[i] = ctx.log_density(rows.row(i).transpose());
    });
    return out;
}

namespace {

// One inverse-Gaussian draw with m = sqrt(chi/psi), shape = chi
// (Michael-Schucany-Haas transformation).
double draw_invgauss(core::Rng& rng, double m, double shape) {
    const double v = rng.normal();
    const double y = v * v;
    const double m2 = m * m;
    const double x = m + m2 * y / (2.0 * shape) -
                     (m / (2.0 * shape)) * std::sqrt(4.0 * m * shape * y + m2 * y * y);
    const double u = rng.uniform();
    return u <= m / (m + x) ? x : m2 / x;
}

constexpr int kChunk = 256;

}  // namespace

std::vector<double> sample_gig(double chi, double psi, int n, std::uint64_t seed) {
    if (!(chi > 0.0) || !(psi > 0.0)) throw InvalidParameter("sample_gig: chi, psi must be > 0");
    if (n < 0) throw InvalidParameter("sample_gig: n must be >= 0");
    const double m = std::sqrt(chi / psi);
    std::vector<double> out(static_cast<std::size_t>(n));
    const std::ptrdiff_t chunks = (n + kChunk - 1) / kChunk;
    core::parallel_for(chunks, [&](std::ptrdiff_t c) {
        core::Rng rng(core::derive_seed(seed, static_cast<std::uint64_t>(c)));
        const int lo = static_cast<int>(c) * kChunk;
        const int hi = std::min(n, lo + kChunk);
        for (int i = lo; i < hi; ++i) out[static_cast<std::size_t>(i)] = draw_invgauss(rng, m, chi);
    });
    return out;
}

double gig_mean(double lambda, double chi, double psi) {
    const double omega = std::sqrt(chi * psi);
    return std::sqrt(chi / psi) *
           std::exp(log_bessel_k(lambda + 1.0, omega) - log_bessel_k(lambda, omega));
}

Eigen::MatrixXd sample_nig(const NigParams& p, int n, std::uint64_t seed) {
    check_params(p);
    if (n < 1) throw InvalidParameter("sample_nig: n must be >= 1");
    const int d = p.dim();
    const ClassicNigParams cp = to_classic(p);
    const Eigen::MatrixXd L = cholesky_or_throw(p.sigma).matrixL();
    Eigen::MatrixXd out(n, d);
    const std::ptrdiff_t chunks = (n + kChunk - 1) / kChunk;
    core::parallel_for(chunks, [&](std::ptrdiff_t c) {
        core::Rng rng(core::derive_seed(seed, static_cast<std::uint64_t>(c)));
        Eigen::VectorXd w(d);
        const int lo = static_cast<int>(c) * kChunk;
        const int hi = std::min(n, lo + kChunk);
        const double m = std::sqrt(cp.chi / cp.psi);
        for (int i = lo; i < hi; ++i) {
            const double z = draw_invgauss(rng, m, cp.chi);
            for (int j = 0; j < d; ++j) w[j] = rng.normal();
            out.row(i) =
                (p.mu + z * p.gamma + std::sqrt(z) * (L * w)).transpose();
        }
    });
    return out;
}

std::string to_record(const NigParams& p) {
    std::ostringstream os;
    os.precision(17);
    os << "fcvar_nig_params v1\n";
    os << "lambda = " << p.lambda << '\n';
    os << "alpha_bar = " << p.alpha_bar << '\n';
    os << "dim = " << p.dim() << '\n';
    os << "mu =";
    for (int i = 0; i < p.dim(); ++i) os << ' ' << p.mu[i];
    os << "\ngamma =";
    for (int i = 0; i < p.dim(); ++i) os << ' ' << p.gamma[i];
    os << "\nsigma =";
    for (int i = 0; i < p.dim(); ++i)
        for (int j = 0; j < p.dim(); ++j) os << ' ' << p.sigma(i, j);
    os << '\n';
    return os.str();
}

NigParams nig_from_record(const std::string& record) {
    std::istringstream in(record);
    std::string line;
    if (!std::getline(in, line) || line.rfind("fcvar_nig_params", 0) != 0) {
        throw ParseError("nig_from_record: missing header");
    }
    NigParams p;
    int dim = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key, eq;
        ls >> key >> eq;
        if (eq != "=") throw ParseError("nig_from_record: bad line `" + line + "`");
        if (key == "lambda") {
            ls >> p.lambda;
        } else if (key == "alpha_bar") {
            ls >> p.alpha_bar;
        } else if (key == "dim") {
            ls >> dim;
            if (dim < 1) throw ParseError("nig_from_record: bad dim");
            p.mu.resize(dim);
            p.gamma.resize(dim);
            p.sigma.resize(dim, dim);
        } else if (key == "mu") {
            for (int i = 0; i < dim; ++i) ls >> p.mu[i];
        } else if (key == "gamma") {
            for (int i = 0; i < dim; ++i) ls >> p.gamma[i];
        } else if (key == "sigma") {
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) ls >> p.sigma(i, j);
        } else {
            throw ParseError("nig_from_record: unknown key `" + key + "`");
        }
        if (ls.fail()) throw ParseError("nig_from_record: bad value in `" + line + "`");
    }
    check_params(p);
    return p;
}

}  // namespace fcvar::nig
