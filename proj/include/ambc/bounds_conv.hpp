#pragma once

#include <vector>

#include "ambc/channel.hpp"
#include "ambc/empirical.hpp"
#include "ambc/power.hpp"
#include "ambc/rng.hpp"

namespace ambc {

/// Draws of sum_i H_i, the log Radon-Nikodym derivative between the
/// conditional law and the product-Gaussian auxiliary channel.
EmpiricalSample sample_converse_density(int n, const EigenSpectrum& g, const PowerAllocation& p,
                                        SeededRng& rng, int num_samples);

enum class ConverseBetaMethod { ChangeOfMeasure, LowerBound };

struct ConverseBeta {
    double beta = 0.0;
    double log_beta = 0.0;
    double eta = 0.0;
    /// Standard error of the estimator over beta, counting the spread of the
    /// estimated threshold.
    double rel_se = 0.0;
    ConverseBetaMethod method = ConverseBetaMethod::ChangeOfMeasure;
};

/// beta_{1-eps} = E_P[exp(-H) 1{H >= eta}] over the draws, eta the level
/// 1 - eps threshold with a fractional weight on the boundary draw. When the
/// 95% half-width exceeds beta / 2 it falls back to
/// max_lambda exp(-lambda) (1 - eps - P[H > lambda]) over sample lambdas.
ConverseBeta np_beta_converse(const EmpiricalSample& draws, double eps);

/// pi^{m/2} / Gamma(m/2 + 1) (P + 1/2)^m.
double ball_volume_bound(int m, double total_power);
double log_ball_volume_bound(int m, double total_power);

/// Supremum over z of the density of prod_j S_j, S_j ~ Gamma(n, (1 + g_j p_j) / (2n)),
/// divided by m n. Golden-section search on log z, where the log density is
/// concave. Requires n >= 2.
double pdf_sup_bound(int m, int n, const EigenSpectrum& g, const PowerAllocation& p);
double log_pdf_sup(int n, const std::vector<double>& snr);

struct ConverseConstants {
    double k1 = 0.0;
    double k2 = 0.0;
    double k = 0.0;
    double log_k1 = 0.0;
    double log_k2 = 0.0;
    int m = 0;
    int n = 0;
};

ConverseConstants converse_constants(int n, const EigenSpectrum& g, const PowerAllocation& p,
                                     double total_power);

struct ConverseResult {
    double rate_nats = 0.0;
    double rate_bits = 0.0;
    double beta = 0.0;
    double log_beta = 0.0;
    double eta = 0.0;
    double k = 0.0;
    double log_k = 0.0;
    double ci_halfwidth = 0.0;  // on rate_nats
    ConverseBetaMethod method = ConverseBetaMethod::ChangeOfMeasure;
    int n = 0;
    double eps = 0.0;
    int d = 0;
};

/// (1/n) log(K m n / beta_{1-eps}) for one tag symbol at the waterfilling
/// allocation. Draws H on rng's stream retargeted to ConverseLaw.
ConverseResult converse_rate_given(int n, const EigenSpectrum& g, double total_power, double eps,
                                   SeededRng& rng, int num_samples);

struct ConverseMixture {
    ConverseResult minus;
    ConverseResult plus;
    ConverseResult mixed;
};

ConverseMixture converse_rate(int n, const EigenSpectrum& g_plus, const EigenSpectrum& g_minus,
                              double total_power, double eps, SeededRng& rng, int num_samples);

}  // namespace ambc
