#include "fcvar/core/special.hpp"

#include <cmath>
#include <limits>

namespace fcvar::core {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

namespace {

// series for P(a,x), valid for x < a+1
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// continued fraction for Q(a,x), valid for x >= a+1 (modified Lentz)
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chisq_sf(double x, double dof) { return gamma_q(0.5 * dof, 0.5 * x); }

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(double (*fn)(double, const void*), const void* ctx, double a, double fa,
                     double b, double fb, double m, double fm, double whole, double tol,
                     int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = fn(lm, ctx);
    const double frm = fn(rm, ctx);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_step(fn, ctx, a, fa, m, fm, lm, flm, left, tol * 0.5, depth - 1) +
           adaptive_step(fn, ctx, m, fm, b, fb, rm, frm, right, tol * 0.5, depth - 1);
}

}  // namespace

double adaptive_simpson(double (*fn)(double, const void*), const void* ctx, double a, double b,
                        double tol, int max_depth) {
    const double m = 0.5 * (a + b);
    const double fa = fn(a, ctx);
    const double fb = fn(b, ctx);
    const double fm = fn(m, ctx);
    const double whole = simpson(a, fa, b, fb, fm);
    return adaptive_step(fn, ctx, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace fcvar::core
