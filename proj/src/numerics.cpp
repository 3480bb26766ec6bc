#include "ambc/numerics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ambc/errors.hpp"

namespace ambc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Bernoulli numbers B_2 .. B_20.
constexpr std::array<double, 10> kBernoulliEven = {
    1.0 / 6.0,        -1.0 / 30.0,     1.0 / 42.0,     -1.0 / 30.0,
    5.0 / 66.0,       -691.0 / 2730.0, 7.0 / 6.0,      -3617.0 / 510.0,
    43867.0 / 798.0,  -174611.0 / 330.0};

// Acklam's rational approximation to the standard normal lower quantile.
double normal_quantile_seed(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Polynomials u_k(p) of the uniform large-order expansion, built from
// u_{k+1} = p^2 (1 - p^2) u_k' / 2 + (1/8) int_0^p (1 - 5 t^2) u_k(t) dt.
constexpr int kDebyeTerms = 11;

const std::vector<std::vector<double>>& debye_polynomials() {
    static const std::vector<std::vector<double>> polys = [] {
        std::vector<std::vector<double>> u;
        u.push_back({1.0});
        for (int k = 0; k + 1 < kDebyeTerms; ++k) {
            const auto& prev = u.back();
            std::vector<double> next(prev.size() + 3, 0.0);
            // p^2 (1 - p^2) u' / 2
            for (std::size_t i = 1; i < prev.size(); ++i) {
                const double di = static_cast<double>(i) * prev[i];
                next[i + 1] += 0.5 * di;
                next[i + 3] -= 0.5 * di;
            }
            // (1/8) int_0^p (1 - 5 t^2) u(t) dt
            for (std::size_t i = 0; i < prev.size(); ++i) {
                next[i + 1] += prev[i] / (8.0 * static_cast<double>(i + 1));
                next[i + 3] -= 5.0 * prev[i] / (8.0 * static_cast<double>(i + 3));
            }
            u.push_back(std::move(next));
        }
        return u;
    }();
    return polys;
}

double eval_poly(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double log_bessel_i_debye(double nu, double x) {
    const double h = std::hypot(nu, x);
    const double p = nu / h;
    const auto& u = debye_polynomials();
    double sum = 0.0;
    double scale = 1.0;
    for (int k = 0; k < kDebyeTerms; ++k) {
        // Odd terms of the I expansion carry a + sign (the K expansion alternates).
        sum += eval_poly(u[k], p) * scale;
        scale /= nu;
    }
    return h - nu * std::asinh(nu / x) - kLogSqrt2Pi - 0.5 * std::log(h) + std::log(sum);
}

double log_bessel_i_series(double nu, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 100000; ++k) {
        term *= q / ((k + 1.0) * (k + 1.0 + nu));
        sum += term;
        if (term < 1e-17 * sum && (k + 1.0) * (k + 1.0 + nu) > q) break;
    }
    return nu * std::log(0.5 * x) - log_gamma(nu + 1.0) + std::log(sum);
}

double log_bessel_i_hankel(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (8.0 * k * x);
        if (std::abs(next) > std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

constexpr double kDebyeMinOrder = 12.0;
constexpr double kSeriesMaxArgument = 500.0;

}  // namespace

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double gaussian_q_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("gaussian_q_inv: p must lie in (0, 1)");
    if (p > 0.5) return -gaussian_q_inv(1.0 - p);
    double x = -normal_quantile_seed(p);
    for (int it = 0; it < 3; ++it) {
        const double err = gaussian_q(x) - p;
        const double pdf = std::exp(-0.5 * x * x - kLogSqrt2Pi);
        if (pdf == 0.0) break;
        const double u = err / pdf;
        x += u / (1.0 - 0.5 * u * x);
    }
    return x;
}

double log_bessel_i(double order, double x) {
    if (!(order >= 0.0) || !std::isfinite(order))
        throw DomainError("log_bessel_i: order must be finite and >= 0");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw DomainError("log_bessel_i: argument must be finite and >= 0");
    if (x == 0.0) return order == 0.0 ? 0.0 : -kInf;
    if (order >= kDebyeMinOrder) return log_bessel_i_debye(order, x);
    if (x <= kSeriesMaxArgument) return log_bessel_i_series(order, x);
    return log_bessel_i_hankel(order, x);
}

double bessel_k0(double x) {
    if (!(x > 0.0)) throw DomainError("bessel_k0: argument must be > 0");
    return std::cyl_bessel_k(0.0, x);
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be > 0");
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

double stirling_log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("stirling_log_gamma: argument must be > 0");
    return x * std::log(x) - x - 0.5 * std::log(x);
}

std::complex<double> log_gamma(std::complex<double> z) {
    if (!(z.real() > 0.0)) throw DomainError("complex log_gamma: requires Re(z) > 0");
    std::complex<double> shift = 0.0;
    while (z.real() < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    const std::complex<double> inv = 1.0 / z;
    const std::complex<double> inv2 = inv * inv;
    std::complex<double> series = 0.0;
    std::complex<double> power = inv;
    for (std::size_t k = 0; k < 8; ++k) {
        const double n2 = 2.0 * static_cast<double>(k + 1);
        series += kBernoulliEven[k] / (n2 * (n2 - 1.0)) * power;
        power *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + kLogSqrt2Pi + series - shift;
}

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be > 0");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    double power = inv2;
    double series = 0.0;
    for (std::size_t k = 0; k < 7; ++k) {
        series += kBernoulliEven[k] / (2.0 * static_cast<double>(k + 1)) * power;
        power *= inv2;
    }
    return acc + std::log(x) - 0.5 / x - series;
}

double trigamma(double x) {
    if (!(x > 0.0)) throw DomainError("trigamma: argument must be > 0");
    double acc = 0.0;
    while (x < 10.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double power = inv2 * inv;
    double series = 0.0;
    for (std::size_t k = 0; k < 7; ++k) {
        series += kBernoulliEven[k] * power;
        power *= inv2;
    }
    return acc + inv + 0.5 * inv2 + series;
}

double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace ambc
