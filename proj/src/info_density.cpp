#include "ambc/info_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ambc/errors.hpp"

namespace ambc {

namespace {

constexpr double kZ95 = 1.959963984540054;

void check_snr(const std::vector<double>& snr) {
    for (double x : snr)
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("mode SNR must be finite and >= 0");
}

double lambda_j(const PerUseTerm& t, double theta) {
    const double s = 1.0 + theta * t.q;
    return theta * t.alpha - std::log(s) + theta * theta * t.ell * t.ell / s;
}

double lambda_j_prime(const PerUseTerm& t, double theta) {
    const double s = 1.0 + theta * t.q;
    return t.alpha - t.q / s + theta * t.ell * t.ell * (2.0 + theta * t.q) / (s * s);
}

}  // namespace

PerUseTerm per_use_term(DensityKind kind, double snr) {
    if (!(snr >= 0.0) || !std::isfinite(snr)) throw DomainError("per_use_term: snr must be >= 0");
    const double l = std::log1p(snr);
    if (kind == DensityKind::UnderConditional) {
        const double s = 1.0 + snr;
        return {l + snr / s, snr / s, std::sqrt(snr) / s};
    }
    return {l - snr, snr, std::sqrt(snr * (1.0 + snr))};
}

double per_use_mean(DensityKind kind, const std::vector<double>& snr) {
    double acc = 0.0;
    for (double x : snr) {
        const PerUseTerm t = per_use_term(kind, x);
        acc += t.alpha - t.q;
    }
    return acc;
}

double per_use_variance(DensityKind kind, const std::vector<double>& snr) {
    double acc = 0.0;
    for (double x : snr) {
        const PerUseTerm t = per_use_term(kind, x);
        acc += t.q * t.q + 2.0 * t.ell * t.ell;
    }
    return acc;
}

std::vector<double> sample_density_sums(DensityKind kind, int n, const std::vector<double>& snr,
                                        double theta, SeededRng& rng, int num_samples) {
    if (n < 1) throw DomainError("sample_density_sums: blocklength must be >= 1");
    if (num_samples < 1) throw DomainError("sample_density_sums: need at least one sample");
    if (!(theta >= 0.0) || !std::isfinite(theta))
        throw DomainError("sample_density_sums: tilt must be finite and >= 0");
    check_snr(snr);

    struct Mode {
        double constant;
        double q;
        double half_v;
        double shift;
    };
    std::vector<Mode> modes;
    double frozen = 0.0;
    const double nn = n;
    for (double x : snr) {
        const PerUseTerm t = per_use_term(kind, x);
        if (t.q == 0.0) {
            frozen += nn * t.alpha;
            continue;
        }
        // Z ~ CN(mu, v) under the tilt; sum_i |Z_i - ell/q|^2 is
        // (v/2) times a noncentral chi-square on 2n degrees of freedom.
        const double s = 1.0 + theta * t.q;
        const double mu = theta * t.ell / s;
        const double v = 1.0 / s;
        const double offset = mu - t.ell / t.q;
        modes.push_back({nn * t.alpha + nn * t.ell * t.ell / t.q, t.q, 0.5 * v,
                         std::sqrt(2.0 * nn * offset * offset / v)});
    }

    std::vector<double> out(static_cast<std::size_t>(num_samples));
    const double central_shape = nn - 0.5;
    for (double& value : out) {
        double acc = frozen;
        for (const Mode& md : modes) {
            const double z = rng.normal() + md.shift;
            const double chi = z * z + 2.0 * rng.gamma(central_shape);
            acc += md.constant - md.q * md.half_v * chi;
        }
        value = acc;
    }
    return out;
}

InfoDensityLaw sample_info_density(DensityKind kind, int n, const EigenSpectrum& g,
                                   const PowerAllocation& p, SeededRng& rng, int num_samples) {
    if (num_samples < 1000) throw DomainError("sample_info_density: num_samples must be >= 1000");
    InfoDensityLaw law;
    law.kind = kind;
    law.n = n;
    law.g = g.g;
    law.p = p;
    law.snr = mode_snr(g.g, p);
    law.seed = rng.seed();
    law.stream_id = rng.stream_id();
    law.draws = EmpiricalSample(sample_density_sums(kind, n, law.snr, 0.0, rng, num_samples));
    return law;
}

double log_mgf(DensityKind kind, int n, const std::vector<double>& snr, double theta) {
    double acc = 0.0;
    for (double x : snr) acc += lambda_j(per_use_term(kind, x), theta);
    return n * acc;
}

double log_mgf_derivative(DensityKind kind, int n, const std::vector<double>& snr,
                          double theta) {
    double acc = 0.0;
    for (double x : snr) acc += lambda_j_prime(per_use_term(kind, x), theta);
    return n * acc;
}

double solve_tilt(DensityKind kind, int n, const std::vector<double>& snr, double target) {
    auto f = [&](double th) { return log_mgf_derivative(kind, n, snr, th) - target; };
    if (f(0.0) >= 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) throw ConvergenceError("solve_tilt: target beyond the reachable tilted mean");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TailEstimate tail_probability(const InfoDensityLaw& law, double gamma, SeededRng& tilt_rng) {
    TailEstimate est;
    est.gamma = gamma;
    const auto values = law.draws.values();
    const std::size_t total = values.size();
    if (total == 0) throw DomainError("tail_probability: empty law");
    est.samples = total;
    est.exceedances = static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [&](double v) { return v >= gamma; }));

    const double theta = solve_tilt(law.kind, law.n, law.snr, gamma);
    if (est.exceedances >= kRawExceedanceFloor || theta == 0.0) {
        const double frac = static_cast<double>(est.exceedances) / static_cast<double>(total);
        est.beta = frac;
        est.log_beta = std::log(frac);
        est.rel_ci = frac > 0.0 ? kZ95 * std::sqrt((1.0 - frac) / (frac * total))
                                : std::numeric_limits<double>::infinity();
        if (frac == 0.0)
            throw InsufficientSamplesError("tail_probability: no draws reach the threshold");
        return est;
    }

    const int count = static_cast<int>(total);
    const std::vector<double> tilted =
        sample_density_sums(law.kind, law.n, law.snr, theta, tilt_rng, count);
    // Weights exp(-theta (S - gamma)) 1{S >= gamma} lie in [0, 1].
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t hits = 0;
    for (double s : tilted) {
        if (s < gamma) continue;
        const double w = std::exp(-theta * (s - gamma));
        sum += w;
        sum_sq += w * w;
        ++hits;
    }
    if (hits == 0) throw InsufficientSamplesError("tail_probability: tilted draws never exceed gamma");
    const double mean_w = sum / count;
    const double var_w = std::max(sum_sq / count - mean_w * mean_w, 0.0) * count / (count - 1.0);
    est.tilted = true;
    est.theta = theta;
    est.log_beta = log_mgf(law.kind, law.n, law.snr, theta) - theta * gamma + std::log(mean_w);
    est.beta = std::exp(est.log_beta);
    est.rel_ci = kZ95 * std::sqrt(var_w / count) / mean_w;
    if (est.rel_ci > 0.5)
        throw InsufficientSamplesError("tail_probability: tilted estimate too noisy");
    return est;
}

}  // namespace ambc
