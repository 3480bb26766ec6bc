#pragma once

#include <complex>

namespace ambc {

/// Gaussian tail probability Q(x) = P[N(0,1) > x].
double gaussian_q(double x);

/// Inverse of gaussian_q on (0, 1). Throws DomainError outside.
double gaussian_q_inv(double p);

/// Natural log of the modified Bessel function I_order(x), evaluated without
/// forming I itself. Non-integer orders are allowed. x = 0 gives 0 for
/// order 0 and -inf otherwise; x < 0 throws DomainError.
double log_bessel_i(double order, double x);

/// Modified Bessel function of the second kind K_0(x), x > 0.
double bessel_k0(double x);

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Leading Stirling form x ln x - x - 0.5 ln x, without the O(1) constant.
double stirling_log_gamma(double x);

/// Principal-branch log Gamma for complex argument with Re(z) > 0.
std::complex<double> log_gamma(std::complex<double> z);

/// Digamma and trigamma for real x > 0.
double digamma(double x);
double trigamma(double x);

/// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

}  // namespace ambc
