#pragma once

namespace fcvar::nig {

/// Modified Bessel function of the second kind K_nu(x), real order, x > 0.
/// Temme series for x < 2, Steed continued fraction for x >= 2, scaled upward
/// recurrence in between orders. K_{-nu} = K_nu.
/// Throws NonPositiveArgument for x <= 0.
double bessel_k(double nu, double x);

/// e^x K_nu(x); avoids underflow for large x.
double bessel_k_scaled(double nu, double x);

/// log K_nu(x); safe for large x and for moderately large orders.
double log_bessel_k(double nu, double x);

/// d/dnu log K_nu(x), central difference. Needed for E[log Z] of the GIG.
double dlog_bessel_k_dnu(double nu, double x);

}  // namespace fcvar::nig
