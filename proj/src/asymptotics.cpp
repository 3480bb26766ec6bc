#include "ambc/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "ambc/errors.hpp"
#include "ambc/info_density.hpp"
#include "ambc/numerics.hpp"

namespace ambc {

namespace {

constexpr double kZ95 = 1.959963984540054;

}  // namespace

double capacity(const std::vector<double>& g, const PowerAllocation& p) {
    double acc = 0.0;
    for (double x : mode_snr(g, p)) acc += std::log1p(x);
    return acc;
}

double dispersion(const std::vector<double>& g, const PowerAllocation& p) {
    double acc = 0.0;
    for (double x : mode_snr(g, p)) acc += x * (x + 2.0) / ((x + 1.0) * (x + 1.0));
    return acc;
}

double dispersion_alt(const std::vector<double>& g, const PowerAllocation& p) {
    double acc = 0.0;
    for (double x : mode_snr(g, p)) acc += 1.0 - 1.0 / ((1.0 + x) * (1.0 + x));
    return acc;
}

NormalApproximation normal_approximation(double capacity_nats, double dispersion, int n, double eps) {
    if (n < 1) throw DomainError("normal_approximation: n must be >= 1");
    if (!(dispersion >= 0.0)) throw DomainError("normal_approximation: dispersion must be >= 0");
    const double backoff = dispersion == 0.0 ? 0.0 : std::sqrt(dispersion / n) * gaussian_q_inv(eps);
    NormalApproximation out;
    out.rate_nats = capacity_nats - backoff;
    out.rate_bits = out.rate_nats / std::numbers::ln2;
    out.negative = out.rate_nats < 0.0;
    return out;
}

BerryEsseen berry_esseen_b(std::span<const double> j_draws) {
    if (j_draws.size() < 2) throw DomainError("berry_esseen_b: need at least two draws");
    double mean = 0.0;
    for (double v : j_draws) mean += v;
    mean /= static_cast<double>(j_draws.size());
    std::vector<double> centred(j_draws.begin(), j_draws.end());
    for (double& v : centred) v -= mean;

    const double nn = static_cast<double>(centred.size());
    double m2 = 0.0;
    double m3 = 0.0;
    for (double v : centred) {
        m2 += v * v;
        m3 += std::abs(v) * v * v;
    }
    m2 /= nn;
    m3 /= nn;
    BerryEsseen out;
    out.second_moment = m2;
    out.third_abs_moment = m3;
    if (m2 <= 1e-300) {
        out.degenerate = true;
        return out;
    }
    out.b = 6.0 * m3 / std::pow(m2, 1.5);
    // Delta method on (m2, m3) with their sample covariance.
    double v22 = 0.0, v33 = 0.0, v23 = 0.0;
    for (double v : centred) {
        const double a = v * v - m2;
        const double b = std::abs(v) * v * v - m3;
        v22 += a * a;
        v33 += b * b;
        v23 += a * b;
    }
    v22 /= nn;
    v33 /= nn;
    v23 /= nn;
    const double d3 = 6.0 / std::pow(m2, 1.5);
    const double d2 = -9.0 * m3 / std::pow(m2, 2.5);
    const double var_b = (d2 * d2 * v22 + d3 * d3 * v33 + 2.0 * d2 * d3 * v23) / nn;
    out.ci_halfwidth = kZ95 * std::sqrt(std::max(var_b, 0.0));
    return out;
}

BerryEsseen berry_esseen_b(const std::vector<double>& g, const PowerAllocation& p, SeededRng& rng,
                           int num_samples) {
    if (num_samples < 10000) throw DomainError("berry_esseen_b: num_samples must be >= 1e4");
    const std::vector<double> snr = mode_snr(g, p);
    const double c = per_use_mean(DensityKind::UnderConditional, snr);
    std::vector<double> j =
        sample_density_sums(DensityKind::UnderConditional, 1, snr, 0.0, rng, num_samples);
    if (per_use_variance(DensityKind::UnderConditional, snr) == 0.0) {
        BerryEsseen out;
        out.degenerate = true;
        return out;
    }
    // Centre on the analytic mean rather than the sample mean.
    const double nn = j.size();
    double m2 = 0.0, m3 = 0.0;
    for (double& v : j) {
        v -= c;
        m2 += v * v;
        m3 += std::abs(v) * v * v;
    }
    m2 /= nn;
    m3 /= nn;
    BerryEsseen out = berry_esseen_b(j);
    out.second_moment = m2;
    out.third_abs_moment = m3;
    out.b = 6.0 * m3 / std::pow(m2, 1.5);
    return out;
}

double sigma_objective(double s, double snr, int m) {
    return m * std::log(s) + snr / s + m * (1.0 / s - 1.0);
}

double verify_sigma_maximizer(double g_j, double p_j, int m) {
    const double x = g_j * p_j;
    if (!(x > 0.0)) throw DomainError("verify_sigma_maximizer: g_j p_j must be > 0");
    if (m < 1) throw DomainError("verify_sigma_maximizer: m must be >= 1");
    // Coarse grid for the bracket, then Newton on the first-order condition.
    const double hi_grid = 4.0 * (1.0 + x);
    double best_s = 1.0;
    double best_v = sigma_objective(1.0, x, m);
    const int points = 4000;
    for (int k = 1; k <= points; ++k) {
        const double s = 0.05 + (hi_grid - 0.05) * k / points;
        if (const double v = sigma_objective(s, x, m); v < best_v) {
            best_v = v;
            best_s = s;
        }
    }
    double s = best_s;
    for (int it = 0; it < 100; ++it) {
        const double d1 = m / s - (x + m) / (s * s);
        const double d2 = -m / (s * s) + 2.0 * (x + m) / (s * s * s);
        const double step = d1 / d2;
        s -= step;
        if (std::abs(step) < 1e-15 * s) break;
    }
    return s;
}

}  // namespace ambc
