#include "ambc/bounds_ach.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "ambc/empirical.hpp"
#include "ambc/errors.hpp"
#include "ambc/numerics.hpp"

namespace ambc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLogOverflow = 700.0;
constexpr double kC1Floor = 1e-300;
constexpr double kZ95 = 1.959963984540054;

// Shared pieces of log q_T - log q_U, without the linear-in-r exponent.
double log_f_common(int n, double snr, double r) {
    if (n < 4) throw DomainError("log_f_ratio: blocklength must be >= 4");
    if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("log_f_ratio: g_j p_j must be > 0");
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("log_f_ratio: r must be > 0");
    const double nn = n;
    const double nx = nn * snr;
    const double nu = c1_bessel_order(n);
    return -(nn + 1.0) * std::numbers::ln2 + nn * std::log1p(snr) + log_gamma(nn) +
           (0.5 - 27.0 * nn / 32.0) * std::log(r) + (0.5 - 5.0 * nn / 32.0) * std::log(nx) +
           log_bessel_i(nu, std::sqrt(r * nx)) - 0.5 * nx;
}

}  // namespace

BetaResult achievability_beta(const InfoDensityLaw& g_law, const InfoDensityLaw& h_law,
                              double eps, double tau, SeededRng& tilt_rng) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("achievability_beta: eps must lie in (0, 1)");
    if (!(tau > 0.0 && tau < eps)) throw DomainError("achievability_beta: need 0 < tau < eps");
    if (g_law.n != h_law.n || g_law.snr != h_law.snr)
        throw DomainError("achievability_beta: laws must share blocklength and spectrum");
    const double level = 1.0 - eps + tau;
    const double gamma = empirical_quantile(h_law.draws, level);
    const TailEstimate tail = tail_probability(g_law, gamma, tilt_rng);
    // Relative spread of beta induced by the quantile estimate of gamma.
    const double rel_gamma = std::exp(-gamma - tail.log_beta) *
                             std::sqrt(level * (1.0 - level) / static_cast<double>(h_law.draws.count()));
    const double rel_tail = tail.rel_ci / kZ95;
    const double rel = std::hypot(rel_tail, rel_gamma);
    BetaResult out;
    out.beta = tail.beta;
    out.log_beta = tail.log_beta;
    out.gamma_n = gamma;
    out.std_error = rel * tail.beta;
    out.log_ci = kZ95 * rel;
    out.tilted = tail.tilted;
    return out;
}

BetaResult achievability_beta(const InfoDensityLaw& g_law, const InfoDensityLaw& h_law,
                              double eps, double tau) {
    SeededRng tilt(g_law.seed, g_law.stream_id ^ (std::uint64_t{1} << 63));
    return achievability_beta(g_law, h_law, eps, tau, tilt);
}

double c1_bessel_order(int n) {
    if (n < 1) throw DomainError("c1_bessel_order: blocklength must be >= 1");
    const double base = 5.0 * n / 16.0;
    const bool odd_integer = (5 * n) % 16 == 0 && ((5 * n) / 16) % 2 == 1;
    return odd_integer ? base - 1.5 : base - 1.0;
}

double log_f_ratio(int n, double snr, double r) {
    return log_f_common(n, snr, r) + (3.0 - snr) * r / (2.0 * (1.0 + snr));
}

double log_f_ratio_closed_form(int n, double snr, double r) {
    return log_f_common(n, snr, r) + (1.0 - snr) * r / (2.0 * (1.0 + snr));
}

double log_c1(int n, double g_j, double p_j, double delta) {
    const double x = g_j * p_j;
    if (!(x > 0.0)) throw DomainError("log_c1: g_j p_j must be > 0");
    if (!(delta > 0.0) || !(delta < 1.0 + x)) throw DomainError("log_c1: delta must lie in (0, 1 + g_j p_j)");
    const double lo = 1.0 + x - delta;
    const double hi = 1.0 + x + delta;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < kC1GridPoints; ++k) {
        const double c = lo + (hi - lo) * k / (kC1GridPoints - 1.0);
        best = std::max(best, log_f_ratio(n, x, c * n));
    }
    if (best > kLogOverflow)
        throw NumericOverflowError("log_c1: log f exceeds 700; the kappa-tau bound is vacuous here");
    return best;
}

double compute_c1(int n, double g_j, double p_j, double delta) {
    return std::max(std::exp(log_c1(n, g_j, p_j, delta)), kC1Floor);
}

double kappa_tau(double tau, double c1) {
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("kappa_tau: tau must lie in (0, 1)");
    if (!(c1 > 0.0)) throw DomainError("kappa_tau: c1 must be > 0");
    return std::min(tau / c1, 1.0);
}

double log_kappa_tau(double tau, double log_c1_value) {
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("log_kappa_tau: tau must lie in (0, 1)");
    return std::min(std::log(tau) - log_c1_value, 0.0);
}

AchievabilityResult achievability_rate_given(int n, const EigenSpectrum& g, double total_power,
                                             double eps, SeededRng& rng, int num_samples,
                                             const AchievabilityOptions& options) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("achievability_rate: eps must lie in (0, 1)");
    const PowerAllocation alloc = waterfill(g, total_power);
    SeededRng g_rng = rng.substream(with_purpose(rng.stream_id(), StreamPurpose::OutputLaw));
    SeededRng h_rng = rng.substream(with_purpose(rng.stream_id(), StreamPurpose::ConditionalLaw));
    const InfoDensityLaw g_law =
        sample_info_density(DensityKind::UnderOutput, n, g, alloc, g_rng, num_samples);
    const InfoDensityLaw h_law =
        sample_info_density(DensityKind::UnderConditional, n, g, alloc, h_rng, num_samples);

    double total_log_c1 = 0.0;
    for (std::size_t j = 0; j < g.g.size(); ++j)
        if (g.g[j] * alloc.p[j] > 0.0) total_log_c1 += log_c1(n, g.g[j], alloc.p[j], options.c1_delta);

    std::optional<AchievabilityResult> best;
    std::optional<InsufficientSamplesError> last_error;
    for (double divisor : options.tau_divisors) {
        const double tau = eps / divisor;
        SeededRng tilt_rng =
            rng.substream(with_purpose(rng.stream_id(), StreamPurpose::TiltedOutputLaw));
        BetaResult beta;
        try {
            beta = achievability_beta(g_law, h_law, eps, tau, tilt_rng);
        } catch (const InsufficientSamplesError& e) {
            last_error = e;
            continue;
        }
        AchievabilityResult res;
        res.log_kappa_tau = log_kappa_tau(tau, total_log_c1);
        res.kappa_tau = std::exp(res.log_kappa_tau);
        res.rate_nats = (res.log_kappa_tau - beta.log_beta) / n;
        res.rate_bits = res.rate_nats / std::numbers::ln2;
        res.beta = beta.beta;
        res.log_beta = beta.log_beta;
        res.gamma_n = beta.gamma_n;
        res.tau = tau;
        res.log_c1 = total_log_c1;
        res.c1 = std::max(std::exp(total_log_c1), kC1Floor);
        res.ci_halfwidth = beta.log_ci / n;
        res.n = n;
        res.eps = eps;
        res.d = static_cast<int>(g.d);
        res.samples = static_cast<std::size_t>(num_samples);
        if (!best || res.rate_nats > best->rate_nats) best = res;
    }
    if (!best) throw *last_error;
    return *best;
}

AchievabilityMixture achievability_rate(int n, const EigenSpectrum& g_plus,
                                        const EigenSpectrum& g_minus, double total_power,
                                        double eps, SeededRng& rng, int num_samples,
                                        const AchievabilityOptions& options) {
    SeededRng plus_rng = rng.substream(with_tag_symbol(rng.stream_id(), +1));
    SeededRng minus_rng = rng.substream(with_tag_symbol(rng.stream_id(), -1));
    AchievabilityMixture out;
    out.minus = achievability_rate_given(n, g_minus, total_power, eps, minus_rng, num_samples, options);
    out.plus = achievability_rate_given(n, g_plus, total_power, eps, plus_rng, num_samples, options);

    AchievabilityResult& mix = out.mixed;
    mix.rate_nats = 0.5 * (out.minus.rate_nats + out.plus.rate_nats);
    mix.rate_bits = mix.rate_nats / std::numbers::ln2;
    mix.ci_halfwidth = 0.5 * std::hypot(out.minus.ci_halfwidth, out.plus.ci_halfwidth);
    mix.beta = mix.log_beta = mix.gamma_n = kNaN;
    mix.kappa_tau = mix.log_kappa_tau = mix.tau = mix.c1 = mix.log_c1 = kNaN;
    mix.n = n;
    mix.eps = eps;
    mix.d = 0;
    mix.samples = static_cast<std::size_t>(num_samples);
    return out;
}

}  // namespace ambc
