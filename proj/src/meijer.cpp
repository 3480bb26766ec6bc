#include "ambc/meijer.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "ambc/errors.hpp"
#include "ambc/numerics.hpp"

namespace ambc {

namespace {

constexpr double kTailCutoff = 1e-15;
constexpr double kRelTolerance = 1e-11;
constexpr int kMaxRefinements = 14;
constexpr int kMaxNodes = 1 << 22;

// Solves copies * psi(a) = log_y for a > 0.
double saddle_abscissa(double log_y, int copies) {
    const double target = log_y / copies;
    double a = target > 0.0 ? std::exp(target) + 0.5 : std::exp(target);
    if (!(a > 0.0)) a = std::numeric_limits<double>::min();
    for (int it = 0; it < 200; ++it) {
        const double f = digamma(a) - target;
        const double step = f / trigamma(a);
        double next = a - step;
        if (next <= 0.0) next = 0.5 * a;
        if (std::abs(next - a) <= 1e-15 * a) return next;
        a = next;
    }
    return a;
}

double log_meijer_from_log_argument(double log_y, int copies, double b) {
    const double a = saddle_abscissa(log_y, copies);
    const double c = a - b;
    const double m = copies;
    const double log_gamma_a = log_gamma(a);
    const double log_f0 = -c * log_y + m * log_gamma_a;

    // Ratio of the integrand on the line to its value at the saddle.
    auto ratio = [&](double t) {
        const std::complex<double> lg = log_gamma(std::complex<double>(a, t));
        const std::complex<double> expo = m * (lg - log_gamma_a) -
                                          std::complex<double>(0.0, t * log_y);
        return std::exp(expo);
    };

    const double width = 1.0 / std::sqrt(m * trigamma(a));
    double h = 0.5 * width;

    // Truncation height: |Gamma(a + it)| decreases monotonically in |t|.
    double t_max = h;
    while (std::abs(ratio(t_max)) > kTailCutoff) {
        t_max *= 2.0;
        if (t_max / h > kMaxNodes) throw ConvergenceError("log_meijer_g_equal: tail does not decay");
    }

    auto coarse_sum = [&](double step) {
        double s = 0.5;
        for (double t = step; t <= t_max; t += step) s += ratio(t).real();
        return s * step;
    };

    double integral = coarse_sum(h);
    for (int level = 0; level < kMaxRefinements; ++level) {
        const double half = 0.5 * h;
        double odd = 0.0;
        std::size_t nodes = 0;
        for (double t = half; t <= t_max; t += h) {
            odd += ratio(t).real();
            ++nodes;
        }
        const double refined = 0.5 * integral + half * odd;
        const double residual = std::abs(refined - integral);
        integral = refined;
        h = half;
        if (residual <= kRelTolerance * std::abs(refined) && level >= 1) {
            if (!(integral > 0.0))
                throw ConvergenceError("log_meijer_g_equal: non-positive contour integral");
            return log_f0 + std::log(integral / std::numbers::pi);
        }
        if (nodes > static_cast<std::size_t>(kMaxNodes))
            break;
    }
    throw ConvergenceError("log_meijer_g_equal: quadrature residual above tolerance");
}

}  // namespace

double log_meijer_g_equal(double y, int copies, double b) {
    if (!(y > 0.0)) throw DomainError("log_meijer_g_equal: y must be > 0");
    if (copies < 1) throw DomainError("log_meijer_g_equal: copies must be >= 1");
    if (!(b >= 0.0)) throw DomainError("log_meijer_g_equal: parameter must be >= 0");
    return log_meijer_from_log_argument(std::log(y), copies, b);
}

double log_product_gamma_pdf(double z, int copies, int shape, double scale) {
    if (copies < 1 || copies > 8) throw DomainError("product_gamma_pdf: copies must lie in [1, 8]");
    if (shape < 1 || shape > 4096) throw DomainError("product_gamma_pdf: shape must lie in [1, 4096]");
    if (!(scale > 0.0)) throw DomainError("product_gamma_pdf: scale must be > 0");
    if (!(z > 0.0)) throw DomainError("product_gamma_pdf: z must be > 0");
    const double m = copies;
    const double log_scale = std::log(scale);
    const double log_y = std::log(z) - m * log_scale;
    return -m * log_scale - m * log_gamma(static_cast<double>(shape)) +
           log_meijer_from_log_argument(log_y, copies, shape - 1.0);
}

double product_gamma_pdf(double z, int copies, int shape, double scale) {
    return std::exp(log_product_gamma_pdf(z, copies, shape, scale));
}

}  // namespace ambc
