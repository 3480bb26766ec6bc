#pragma once

#include <vector>

#include "ambc/channel.hpp"
#include "ambc/info_density.hpp"
#include "ambc/power.hpp"
#include "ambc/rng.hpp"

namespace ambc {

struct BetaResult {
    double beta = 0.0;
    double log_beta = 0.0;
    double gamma_n = 0.0;
    /// Standard error on beta, including the spread of the estimated gamma_n
    /// (the G and H laws differ by the density ratio exp(-gamma) there).
    double std_error = 0.0;
    /// 95% half-width on log beta.
    double log_ci = 0.0;
    bool tilted = false;
};

/// gamma_n is the H_n threshold with P[H_n >= gamma_n] = 1 - eps + tau and
/// beta = P[G_n >= gamma_n]. Without an explicit generator the tilted
/// fallback draws from g_law's stream with bit 63 flipped.
BetaResult achievability_beta(const InfoDensityLaw& g_law, const InfoDensityLaw& h_law,
                              double eps, double tau);
BetaResult achievability_beta(const InfoDensityLaw& g_law, const InfoDensityLaw& h_law,
                              double eps, double tau, SeededRng& tilt_rng);

/// log f(r) = log q_T(r) - log q_U(r), the ratio of the noncentral
/// chi-square law (5n/8 degrees of freedom, noncentrality n x) to the
/// Gamma(n, (1 + x) / 2) law, x = g_j p_j.
double log_f_ratio(int n, double snr, double r);

/// The same ratio with the closed-form exponent coefficient (1 - x) in place
/// of (3 - x).
double log_f_ratio_closed_form(int n, double snr, double r);

/// Order of the Bessel factor: 5n/16 - 1, or 5n/16 - 3/2 when 5n/16 is an
/// odd integer.
double c1_bessel_order(int n);

/// Maximum of log f(cn) over at least 512 points of c in
/// [1 + x - delta, 1 + x + delta]. Throws NumericOverflowError when log f
/// exceeds 700.
double log_c1(int n, double g_j, double p_j, double delta);

/// exp(log_c1) floored at 1e-300.
double compute_c1(int n, double g_j, double p_j, double delta);

inline constexpr double kDefaultC1Delta = 0.05;
inline constexpr int kC1GridPoints = 513;

/// min(tau / c1, 1).
double kappa_tau(double tau, double c1);
double log_kappa_tau(double tau, double log_c1_value);

struct AchievabilityResult {
    double rate_nats = 0.0;
    double rate_bits = 0.0;
    double beta = 0.0;
    double log_beta = 0.0;
    double gamma_n = 0.0;
    double kappa_tau = 0.0;
    double log_kappa_tau = 0.0;
    double tau = 0.0;
    double c1 = 0.0;
    double log_c1 = 0.0;
    double ci_halfwidth = 0.0;  // 95%, on rate_nats
    int n = 0;
    double eps = 0.0;
    int d = 0;                  // -1, +1, or 0 for the mixture
    std::size_t samples = 0;
};

struct AchievabilityOptions {
    double c1_delta = kDefaultC1Delta;
    std::vector<double> tau_divisors = {2.0, 4.0, 8.0, 16.0};
};

/// Conditional bound for one tag symbol. G_n, H_n and the tilt draw from
/// rng's stream retargeted to the OutputLaw, ConditionalLaw and
/// TiltedOutputLaw purposes.
AchievabilityResult achievability_rate_given(int n, const EigenSpectrum& g, double total_power,
                                             double eps, SeededRng& rng, int num_samples,
                                             const AchievabilityOptions& options = {});

struct AchievabilityMixture {
    AchievabilityResult minus;
    AchievabilityResult plus;
    AchievabilityResult mixed;
};

/// Prior 1/2 on each tag symbol; each symbol runs on rng's stream with its
/// tag bits set.
AchievabilityMixture achievability_rate(int n, const EigenSpectrum& g_plus,
                                        const EigenSpectrum& g_minus, double total_power,
                                        double eps, SeededRng& rng, int num_samples,
                                        const AchievabilityOptions& options = {});

}  // namespace ambc
