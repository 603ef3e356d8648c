#include "fcvar/nig/bessel.hpp"

#include <cmath>
#include <limits>

#include "fcvar/core/errors.hpp"

namespace fcvar::nig {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kEuler = 0.57721566490153286060651209;

// gam1 = [1/Gamma(1-mu) - 1/Gamma(1+mu)] / (2 mu), gam2 = the average,
// with the mu -> 0 limit handled by series.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
    gampl = 1.0 / std::tgamma(1.0 + mu);
    gammi = 1.0 / std::tgamma(1.0 - mu);
    if (std::fabs(mu) < 1e-4) {
        // from 1/Gamma(1+x) = 1 + g x + c2 x^2 + c3 x^3 + ...:
        // [1/Gamma(1-mu) - 1/Gamma(1+mu)] / (2 mu) = -g - c3 mu^2 + O(mu^4)
        constexpr double c3 = -0.04200263503409523553;
        gam1 = -(kEuler + c3 * mu * mu);
    } else {
        gam1 = (gammi - gampl) / (2.0 * mu);
    }
    gam2 = 0.5 * (gammi + gampl);
}

// K_mu(x) and K_{mu+1}(x), unscaled, for |mu| <= 1/2 and 0 < x < 2 (Temme).
void bessel_k_temme(double mu, double x, double& kmu, double& kmu1) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * mu;
    const double fact = std::fabs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    const double d = -std::log(x2);
    const double e = mu * d;
    const double fact2 = std::fabs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    const double ee = std::exp(e);
    double p = 0.5 * ee / gampl;
    double q = 0.5 / (ee * gammi);
    double c = 1.0;
    const double d2 = x2 * x2;
    double sum1 = p;
    const double mu2 = mu * mu;
    for (int i = 1; i <= 500; ++i) {
        ff = (i * ff + p + q) / (i * i - mu2);
        c *= d2 / i;
        p /= (i - mu);
        q /= (i + mu);
        sum += c * ff;
        sum1 += c * (p - i * ff);
        if (std::fabs(c * ff) < std::fabs(sum) * kEps) break;
    }
    kmu = sum;
    kmu1 = sum1 * 2.0 / x;
}

// Scaled e^x K_mu(x) and e^x K_{mu+1}(x) for |mu| <= 1/2 and x >= 2
// (Steed's continued fraction CF2).
void bessel_k_steed_scaled(double mu, double x, double& kmu, double& kmu1) {
    const double mu2 = mu * mu;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 5000; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < kEps) break;
    }
    h = a1 * h;
    kmu = std::sqrt(kPi / (2.0 * x)) / s;
    kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

// log K_nu(x) via fractional seed + scaled upward recurrence.
double log_k_impl(double nu, double x) {
    if (!(x > 0.0)) throw NonPositiveArgument("bessel_k: x must be > 0");
    nu = std::fabs(nu);  // K_{-nu} = K_nu
    const int n = static_cast<int>(nu + 0.5);
    const double mu = nu - n;  // |mu| <= 1/2

    double kmu, kmu1;
    double log_offset;
    if (x < 2.0) {
        bessel_k_temme(mu, x, kmu, kmu1);
        log_offset = -x;  // values are unscaled
        // rescale to e^x K for a uniform recurrence
        const double s = std::exp(x);
        kmu *= s;
        kmu1 *= s;
    } else {
        bessel_k_steed_scaled(mu, x, kmu, kmu1);
        log_offset = -x;
    }

    // upward recurrence K_{v+1} = K_{v-1} + (2v/x) K_v on scaled values
    double km = kmu, k0 = kmu1;
    if (n == 0) {
        return std::log(kmu) + log_offset;
    }
    double v = mu + 1.0;
    for (int i = 1; i < n; ++i) {
        const double kp = km + (2.0 * v / x) * k0;
        km = k0;
        k0 = kp;
        v += 1.0;
        if (k0 > 1e250) {
            km /= 1e250;
            k0 /= 1e250;
            log_offset += 250.0 * 2.302585092994045684;
        }
    }
    return std::log(k0) + log_offset;
}

}  // namespace

double log_bessel_k(double nu, double x) { return log_k_impl(nu, x); }

double bessel_k(double nu, double x) { return std::exp(log_k_impl(nu, x)); }

double bessel_k_scaled(double nu, double x) { return std::exp(log_k_impl(nu, x) + x); }

double dlog_bessel_k_dnu(double nu, double x) {
    const double h = 1e-5 * (1.0 + std::fabs(nu));
    return (log_k_impl(nu + h, x) - log_k_impl(nu - h, x)) / (2.0 * h);
}

}  // namespace fcvar::nig
