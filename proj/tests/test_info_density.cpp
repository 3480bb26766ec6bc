#include <doctest.h>

#include <cmath>

#include "ambc/errors.hpp"
#include "ambc/info_density.hpp"
#include "ambc/power.hpp"
#include "oracles.hpp"

using namespace ambc;

namespace {

EigenSpectrum spectrum(std::vector<double> g) { return {std::move(g), TagSymbol::Plus}; }

PowerAllocation fixed_power(std::vector<double> p) {
    PowerAllocation a;
    a.total_power = 0.0;
    for (double v : p) a.total_power += v;
    a.p = std::move(p);
    return a;
}

// Direct per-use evaluation of the two laws from fresh CN(0, 1) draws.
double direct_sum(DensityKind kind, int n, double x, SeededRng& rng) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = rng.complex_normal();
        if (kind == DensityKind::UnderOutput)
            acc += std::log1p(x) + 1.0 - std::norm(std::sqrt(x) * z - std::sqrt(1.0 + x));
        else
            acc += std::log1p(x) + 1.0 - std::norm(std::sqrt(x) * z - 1.0) / (1.0 + x);
    }
    return acc;
}

}  // namespace

TEST_CASE("per-use moments") {
    for (double x : {0.0, 0.5, 1.0, 7.0}) {
        CHECK(per_use_mean(DensityKind::UnderConditional, {x}) == doctest::Approx(std::log1p(x)).epsilon(1e-14));
        CHECK(per_use_variance(DensityKind::UnderConditional, {x}) ==
              doctest::Approx(1.0 - 1.0 / ((1 + x) * (1 + x))).epsilon(1e-14));
        CHECK(per_use_mean(DensityKind::UnderOutput, {x}) == doctest::Approx(std::log1p(x) - 2 * x).epsilon(1e-14));
    }
}

TEST_CASE("zero power gives the constant zero") {
    SeededRng rng(1, 1);
    const auto law = sample_info_density(DensityKind::UnderConditional, 50, spectrum({1.0, 2.0}),
                                         fixed_power({0.0, 0.0}), rng, 1000);
    for (double v : law.draws.values()) CHECK(v == 0.0);
    const auto g = sample_info_density(DensityKind::UnderOutput, 50, spectrum({1.0}), fixed_power({0.0}), rng, 1000);
    CHECK(g.draws.variance() == 0.0);
}

TEST_CASE("mean and variance of the conditional law") {
    SeededRng rng(2, 1);
    const int samples = 100000;
    const auto law = sample_info_density(DensityKind::UnderConditional, 100, spectrum({1.0}), fixed_power({1.0}),
                                         rng, samples);
    const double sd = std::sqrt(law.draws.variance());
    CHECK(std::abs(law.draws.mean() / 100 - std::log(2.0)) < 3.0 * sd / 100 / std::sqrt(samples));
    // Per-use variance V = m - sum 1/(1+x)^2, so Var(H_n) = n V.
    const double v = law.draws.variance() / 100;
    CHECK(std::abs(v - 0.75) < 4.0 * 0.75 * std::sqrt(2.0 / samples));
}

TEST_CASE("collapsed sampler matches the per-use definition") {
    for (DensityKind kind : {DensityKind::UnderOutput, DensityKind::UnderConditional})
        for (int n : {1, 3, 40}) {
            const double x = 1.7;
            SeededRng a(3, 1), b(3, 2);
            const int samples = 40000;
            const auto law = sample_info_density(kind, n, spectrum({x}), fixed_power({1.0}), a, samples);
            double mean = 0.0, sq = 0.0;
            for (int i = 0; i < samples; ++i) {
                const double v = direct_sum(kind, n, x, b);
                mean += v;
                sq += v * v;
            }
            mean /= samples;
            const double var = sq / samples - mean * mean;
            const double se = std::sqrt((var + law.draws.variance()) / samples);
            CAPTURE(n);
            CHECK(std::abs(law.draws.mean() - mean) < 4.0 * se);
            CHECK(std::abs(law.draws.variance() / var - 1.0) < 0.05);
            // Third-moment agreement through the upper tail.
            const double level = empirical_quantile(law.draws, 0.05);
            std::size_t hits = 0;
            SeededRng c(3, 3);
            for (int i = 0; i < samples; ++i) hits += direct_sum(kind, n, x, c) >= level;
            CHECK(std::abs(double(hits) / samples - 0.05) < 4.0 * std::sqrt(0.05 * 0.95 / samples));
        }
}

TEST_CASE("output-law mean does not exceed the conditional mean") {
    SeededRng rng(4, 1);
    const auto g = sample_info_density(DensityKind::UnderOutput, 20, spectrum({2.0, 0.5}), fixed_power({0.6, 0.4}), rng, 20000);
    const auto h = sample_info_density(DensityKind::UnderConditional, 20, spectrum({2.0, 0.5}), fixed_power({0.6, 0.4}), rng, 20000);
    const double slack = 3.0 * std::sqrt((g.draws.variance() + h.draws.variance()) / 20000);
    CHECK(g.draws.mean() <= h.draws.mean() + slack);
}

TEST_CASE("sampler preconditions") {
    SeededRng rng(5, 1);
    CHECK_THROWS_AS(sample_info_density(DensityKind::UnderOutput, 0, spectrum({1.0}), fixed_power({1.0}), rng, 1000), DomainError);
    CHECK_THROWS_AS(sample_info_density(DensityKind::UnderOutput, 10, spectrum({1.0}), fixed_power({1.0}), rng, 999), DomainError);
}

TEST_CASE("log-MGF and tilt") {
    const std::vector<double> snr = {0.8, 2.0};
    for (DensityKind kind : {DensityKind::UnderOutput, DensityKind::UnderConditional}) {
        CHECK(log_mgf(kind, 7, snr, 0.0) == 0.0);
        CHECK(log_mgf_derivative(kind, 7, snr, 0.0) == doctest::Approx(7 * per_use_mean(kind, snr)));
        for (double th : {0.1, 0.5, 0.9}) {
            const double h = 1e-6;
            CHECK(log_mgf_derivative(kind, 7, snr, th) ==
                  doctest::Approx((log_mgf(kind, 7, snr, th + h) - log_mgf(kind, 7, snr, th - h)) / (2 * h)).epsilon(1e-6));
        }
    }
    // The conditional law is the output law tilted by theta = 1.
    CHECK(std::abs(log_mgf(DensityKind::UnderOutput, 7, snr, 1.0)) < 1e-12);
    CHECK(log_mgf_derivative(DensityKind::UnderOutput, 7, snr, 1.0) ==
          doctest::Approx(7 * per_use_mean(DensityKind::UnderConditional, snr)).epsilon(1e-12));
    const double target = 3.0;
    const double th = solve_tilt(DensityKind::UnderOutput, 7, snr, target);
    CHECK(log_mgf_derivative(DensityKind::UnderOutput, 7, snr, th) == doctest::Approx(target).epsilon(1e-10));
    CHECK(solve_tilt(DensityKind::UnderOutput, 7, snr, -100.0) == 0.0);
}

TEST_CASE("tilted draws have the tilted mean") {
    const std::vector<double> snr = {1.0};
    const double th = 0.6;
    SeededRng rng(6, 1);
    const auto v = sample_density_sums(DensityKind::UnderOutput, 30, snr, th, rng, 50000);
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    CHECK(std::abs(m - log_mgf_derivative(DensityKind::UnderOutput, 30, snr, th)) < 0.1);
}

TEST_CASE("tail estimate: raw and tilted agree where both apply") {
    const std::vector<double> g = {1.0};
    SeededRng rng(7, 1);
    const auto law = sample_info_density(DensityKind::UnderOutput, 10, spectrum(g), fixed_power({1.0}), rng, 200000);
    const double gamma = empirical_quantile(law.draws, 0.002);
    SeededRng tilt(7, 2);
    const auto raw = tail_probability(law, gamma, tilt);
    CHECK_FALSE(raw.tilted);
    // Force the tilt by thinning the law.
    InfoDensityLaw small = law;
    small.draws = EmpiricalSample(std::vector<double>(law.draws.values().begin(), law.draws.values().begin() + 20000));
    SeededRng tilt2(7, 3);
    const auto is = tail_probability(small, gamma, tilt2);
    CHECK(is.tilted);
    const double se = std::hypot(raw.rel_ci * raw.beta, is.rel_ci * is.beta) / 1.96;
    CHECK(std::abs(is.beta - raw.beta) < 3.0 * se);
}

TEST_CASE("tail estimate at a deep threshold matches the exact chi-square tail") {
    // n = 1, x = 1: P[G >= gamma] by quadrature.
    const std::vector<double> snr = {1.0};
    const auto t = per_use_term(DensityKind::UnderOutput, 1.0);
    SeededRng rng(8, 1);
    const auto law = sample_info_density(DensityKind::UnderOutput, 1, spectrum({1.0}), fixed_power({1.0}), rng, 5000);
    const double gamma = 1.67;
    const double exact = oracle::single_use_tail(t.alpha, t.q, t.ell, gamma);
    SeededRng tilt(8, 2);
    const auto est = tail_probability(law, gamma, tilt);
    CHECK(est.tilted);
    CAPTURE(exact);
    CAPTURE(est.beta);
    CHECK(std::abs(est.beta - exact) < 3.0 * est.rel_ci / 1.96 * est.beta);
}
