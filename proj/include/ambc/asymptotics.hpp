#pragma once

#include <span>
#include <vector>

#include "ambc/power.hpp"
#include "ambc/rng.hpp"

namespace ambc {

/// sum_j log(1 + g_j p_j), nats per channel use.
double capacity(const std::vector<double>& g, const PowerAllocation& p);

/// sum_j x (x + 2) / (x + 1)^2 with x = g_j p_j.
double dispersion(const std::vector<double>& g, const PowerAllocation& p);
/// m - sum_j 1 / (1 + x)^2.
double dispersion_alt(const std::vector<double>& g, const PowerAllocation& p);

struct NormalApproximation {
    double rate_nats = 0.0;
    double rate_bits = 0.0;
    bool negative = false;
};

/// C - sqrt(V / n) Qinv(eps); the O(log n / n) term is omitted.
NormalApproximation normal_approximation(double capacity_nats, double dispersion, int n, double eps);

struct BerryEsseen {
    double b = 0.0;
    double ci_halfwidth = 0.0;
    double second_moment = 0.0;
    double third_abs_moment = 0.0;
    bool degenerate = false;
};

/// B = 6 E|J|^3 / (E J^2)^{3/2}, J the per-use information density centred
/// on its analytic mean C. Zero variance sets the degenerate flag.
BerryEsseen berry_esseen_b(const std::vector<double>& g, const PowerAllocation& p, SeededRng& rng,
                           int num_samples);

/// The same estimator on an arbitrary sample of J, centred on its own mean.
BerryEsseen berry_esseen_b(std::span<const double> j_draws);

/// Stationary point of m log s + x / s + m (1 / s - 1) in s = sigma^2,
/// x = g_j p_j. It lies at 1 + x / m and is a minimum of that expression.
double verify_sigma_maximizer(double g_j, double p_j, int m = 1);

/// m log s + x / s + m (1 / s - 1).
double sigma_objective(double s, double snr, int m);

struct AsymptoticSummary {
    double capacity_nats = 0.0;
    double dispersion = 0.0;
    double berry_esseen_b = 0.0;
    int n = 0;
    double eps = 0.0;
    double rate_na_nats = 0.0;
    double rate_na_bits = 0.0;
};

}  // namespace ambc
