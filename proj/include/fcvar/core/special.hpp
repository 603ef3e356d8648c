#pragma once

namespace fcvar::core {

/// Standard normal CDF.
double normal_cdf(double x);

/// Regularized upper incomplete gamma Q(a, x) = Γ(a,x)/Γ(a), a > 0, x >= 0.
double gamma_q(double a, double x);

/// Chi-square survival function P(X > x) with dof degrees of freedom.
double chisq_sf(double x, double dof);

/// Simple adaptive Simpson quadrature of fn over [a, b].
double adaptive_simpson(double (*fn)(double, const void*), const void* ctx, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

}  // namespace fcvar::core
