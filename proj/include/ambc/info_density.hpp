#pragma once

#include <cstdint>
#include <vector>

#include "ambc/channel.hpp"
#include "ambc/empirical.hpp"
#include "ambc/power.hpp"
#include "ambc/rng.hpp"

namespace ambc {

/// G_n draws Y from the capacity-achieving output law; H_n from the
/// conditional law given the codeword.
enum class DensityKind { UnderOutput, UnderConditional };

/// One channel use of one eigenmode: alpha - q |Z|^2 + 2 ell Re Z with
/// Z ~ CN(0, 1).
struct PerUseTerm {
    double alpha = 0.0;
    double q = 0.0;
    double ell = 0.0;
};

PerUseTerm per_use_term(DensityKind kind, double snr);

/// Analytic per-use mean and variance summed over modes.
double per_use_mean(DensityKind kind, const std::vector<double>& snr);
double per_use_variance(DensityKind kind, const std::vector<double>& snr);

struct InfoDensityLaw {
    DensityKind kind = DensityKind::UnderConditional;
    int n = 0;
    std::vector<double> g;
    PowerAllocation p;
    std::vector<double> snr;
    EmpiricalSample draws;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Draws of the blocklength-n sum. Each mode's n i.i.d. terms collapse to a
/// scaled noncentral chi-square with 2n degrees of freedom, so one draw costs
/// O(m). Requires n >= 1 and num_samples >= 1000.
InfoDensityLaw sample_info_density(DensityKind kind, int n, const EigenSpectrum& g,
                                   const PowerAllocation& p, SeededRng& rng, int num_samples);

/// The law sampled under the exponential tilt exp(theta * sum) of its own
/// per-use terms; theta = 0 is the untilted law.
std::vector<double> sample_density_sums(DensityKind kind, int n, const std::vector<double>& snr,
                                        double theta, SeededRng& rng, int num_samples);

/// n * sum_j Lambda_j(theta), the log-MGF of the blocklength sum, and its
/// derivative in theta.
double log_mgf(DensityKind kind, int n, const std::vector<double>& snr, double theta);
double log_mgf_derivative(DensityKind kind, int n, const std::vector<double>& snr, double theta);

/// theta > 0 whose tilted mean equals target. Returns 0 when target does not
/// exceed the untilted mean.
double solve_tilt(DensityKind kind, int n, const std::vector<double>& snr, double target);

/// P[sum >= gamma] with diagnostics. log_beta is authoritative because beta
/// itself underflows at large n.
struct TailEstimate {
    double gamma = 0.0;
    double beta = 0.0;
    double log_beta = 0.0;
    double rel_ci = 0.0;  // 95% half-width over beta
    std::size_t exceedances = 0;
    bool tilted = false;
    double theta = 0.0;
    std::size_t samples = 0;

    double ci_halfwidth() const { return rel_ci * beta; }
};

/// Raw fraction of law draws at or above gamma when at least 100 draws
/// exceed it; otherwise importance sampling under the tilt that centres the
/// sum on gamma, drawn from `tilt_rng`. Throws InsufficientSamplesError when
/// the tilted 95% half-width exceeds beta / 2.
TailEstimate tail_probability(const InfoDensityLaw& law, double gamma, SeededRng& tilt_rng);

inline constexpr std::size_t kRawExceedanceFloor = 100;

}  // namespace ambc
