#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ambc/asymptotics.hpp"
#include "ambc/bounds_ach.hpp"
#include "ambc/bounds_conv.hpp"
#include "ambc/errors.hpp"
#include "ambc/meijer.hpp"
#include "ambc/numerics.hpp"
#include "oracles.hpp"

using namespace ambc;

namespace {

EigenSpectrum spectrum(std::vector<double> g) { return {std::move(g), TagSymbol::Plus}; }

PowerAllocation fixed_power(std::vector<double> p) {
    PowerAllocation a;
    for (double v : p) a.total_power += v;
    a.p = std::move(p);
    return a;
}

struct Spectra {
    EigenSpectrum plus, minus;
};

Spectra fig1_spectra(std::uint64_t seed, std::uint64_t k = 0) {
    SeededRng rng(seed, stream_for(StreamPurpose::Channel, k));
    const auto ch = draw_channel(rng, 2, 3, Fading::rayleigh(), 0.5);
    return {eigen_spectrum(composite(ch, TagSymbol::Plus)), eigen_spectrum(composite(ch, TagSymbol::Minus))};
}

double mixed_capacity(const Spectra& s, double power) {
    return 0.5 * (capacity(s.plus.g, waterfill(s.plus, power)) + capacity(s.minus.g, waterfill(s.minus, power)));
}

}  // namespace

TEST_CASE("converse density moments") {
    SeededRng rng(21, 1);
    const int samples = 50000;
    const auto d = sample_converse_density(50, spectrum({2.0, 0.5}), fixed_power({0.7, 0.3}), rng, samples);
    const std::vector<double> snr = {1.4, 0.15};
    const double c = std::log1p(snr[0]) + std::log1p(snr[1]);
    const double v = 2.0 - 1.0 / std::pow(1 + snr[0], 2) - 1.0 / std::pow(1 + snr[1], 2);
    CHECK(std::abs(d.mean() / 50 - c) < 3.0 * std::sqrt(d.variance()) / 50 / std::sqrt(samples));
    CHECK(std::abs(d.variance() / 50 / v - 1.0) < 0.05);

    const auto z = sample_converse_density(50, spectrum({2.0}), fixed_power({0.0}), rng, 1000);
    CHECK(z.variance() == 0.0);
}

TEST_CASE("identical distributions give beta = 1 - eps") {
    const int samples = 10000;
    const EmpiricalSample zeros(std::vector<double>(samples, 0.0));
    for (double eps : {0.3, 0.1, 0.01}) {
        const auto b = np_beta_converse(zeros, eps);
        CHECK(std::abs(b.beta - (1 - eps)) < 2.0 / std::sqrt(samples));
    }
}

TEST_CASE("single-use converse beta matches quadrature") {
    for (double x : {0.5, 1.0, 4.0}) {
        const double eps = 0.1;
        const auto th = per_use_term(DensityKind::UnderConditional, x);
        const auto tg = per_use_term(DensityKind::UnderOutput, x);
        const double eta = oracle::single_use_threshold(th.alpha, th.q, th.ell, 1 - eps);
        const double exact = oracle::single_use_tail(tg.alpha, tg.q, tg.ell, eta);
        SeededRng rng(22, 1);
        const auto d = sample_converse_density(1, spectrum({x}), fixed_power({1.0}), rng, 100000);
        const auto b = np_beta_converse(d, eps);
        CAPTURE(x);
        CAPTURE(exact);
        CAPTURE(b.beta);
        CHECK(b.method == ConverseBetaMethod::ChangeOfMeasure);
        CHECK(std::abs(b.beta - exact) < 3.0 * b.rel_se * b.beta);
        CHECK(std::abs(b.eta - eta) < 0.05);
    }
}

TEST_CASE("beta grows as eps shrinks") {
    SeededRng rng(23, 1);
    const auto d = sample_converse_density(20, spectrum({1.0}), fixed_power({1.0}), rng, 50000);
    const double b3 = np_beta_converse(d, 0.3).beta;
    const double b1 = np_beta_converse(d, 0.1).beta;
    const double b01 = np_beta_converse(d, 0.01).beta;
    CHECK(b3 < b1);
    CHECK(b1 < b01);
    CHECK(b01 <= 1.0);
}

TEST_CASE("noisy change of measure falls back to the explicit lower bound") {
    std::vector<double> v(1000, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.001 * static_cast<double>(i);
    v[0] = -50.0;
    v[1] = -49.0;
    const EmpiricalSample s(v);
    const double eps = 0.001;
    const auto b = np_beta_converse(s, eps);
    CHECK(b.method == ConverseBetaMethod::LowerBound);
    double best = -1e300;
    const auto xs = s.sorted();
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double above = double(xs.size() - k - 1) / double(xs.size());
        if (1 - eps - above > 0) best = std::max(best, -xs[k] + std::log(1 - eps - above));
    }
    CHECK(b.log_beta == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("converse beta preconditions") {
    const EmpiricalSample s(std::vector<double>(10, 0.0));
    CHECK_THROWS_AS(np_beta_converse(s, 0.0), DomainError);
    CHECK_THROWS_AS(np_beta_converse(s, 1.0), DomainError);
    CHECK_THROWS_AS(np_beta_converse(EmpiricalSample{}, 0.1), DomainError);
}

TEST_CASE("ball volumes") {
    CHECK(ball_volume_bound(2, 0.5) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
    CHECK(ball_volume_bound(3, 0.5) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14));
    CHECK(ball_volume_bound(1, 1.5) == doctest::Approx(4.0).epsilon(1e-14));
    for (int m : {2, 4, 8}) {
        const double chain = m / 2.0 * std::log(std::numbers::pi) - 0.5 * std::log(m) -
                             m / 2.0 * std::log(m / 2.0) + m * std::log(1.5);
        // Gamma(m/2 + 1) < sqrt(m) (m/2)^{m/2} here, so the volume exceeds this chain.
        CHECK(log_ball_volume_bound(m, 1.0) > chain);
    }
    CHECK_THROWS_AS(ball_volume_bound(0, 1.0), DomainError);
    CHECK_THROWS_AS(ball_volume_bound(2, 0.0), DomainError);
}

TEST_CASE("single-mode pdf supremum is the gamma mode") {
    for (int n : {2, 16, 128, 1024})
        for (double x : {0.3, 1.0, 5.0}) {
            const double theta = (1 + x) / (2.0 * n);
            const double mode_pdf = oracle::gamma_pdf((n - 1) * theta, n, theta);
            const double k1 = pdf_sup_bound(1, n, spectrum({x}), fixed_power({1.0}));
            CAPTURE(n);
            CHECK(k1 * n == doctest::Approx(mode_pdf).epsilon(1e-6));
        }
}

TEST_CASE("pdf supremum dominates the density") {
    const int n = 16;
    const auto g = spectrum({2.0, 0.7});
    const auto p = fixed_power({0.6, 0.4});
    const double sup = pdf_sup_bound(2, n, g, p) * 2 * n;
    const double theta = std::sqrt((1 + 1.2) / (2.0 * n) * (1 + 0.28) / (2.0 * n));
    SeededRng rng(24, 1);
    for (int i = 0; i < 10; ++i) {
        const double z = (1.2 + 0.28) / 4 * rng.uniform() * 3.0;
        CHECK(product_gamma_pdf(z, 2, n, theta) <= sup * (1 + 1e-9));
    }
    CHECK_THROWS_AS(pdf_sup_bound(3, n, g, p), DomainError);
    CHECK_THROWS_AS(pdf_sup_bound(2, 1, g, p), DomainError);
}

TEST_CASE("converse constants") {
    const auto g = spectrum({3.0, 1.5, 0.8});
    const auto p = waterfill(g, 2.0);
    const auto k = converse_constants(128, g, p, 2.0);
    CHECK(std::isfinite(k.k1));
    CHECK(k.k1 > 0.0);
    CHECK(k.k == doctest::Approx(k.k1 * k.k2).epsilon(1e-14));
    CHECK(k.k2 == doctest::Approx(ball_volume_bound(3, 2.0)));
    CHECK(k.m == 3);
    CHECK(k.n == 128);
}

TEST_CASE("the S statistic and the auxiliary density") {
    // S_j = (1 + x)/n sum_i |Z_i|^2 has mean 1 + x, a Gamma(n, (1 + x)/n) law.
    const int n = 24;
    const double x = 1.3;
    const int samples = 40000;
    SeededRng rng(25, 1);
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < samples; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += std::norm(rng.complex_normal());
        const double s = (1 + x) / n * acc;
        sum += s;
        sq += s * s;
    }
    const double mean = sum / samples;
    const double sd = std::sqrt(sq / samples - mean * mean);
    CHECK(std::abs(mean - (1 + x)) < 3.0 * sd / std::sqrt(samples));
    CHECK(sd == doctest::Approx((1 + x) / std::sqrt(n)).epsilon(0.02));
    // The bound uses the scale (1 + x)/(2n); its supremum dominates the one at scale (1 + x)/n.
    const double used = pdf_sup_bound(1, n, spectrum({x}), fixed_power({1.0})) * n;
    const double theta = (1 + x) / n;
    CHECK(used >= oracle::gamma_pdf((n - 1) * theta, n, theta));
}

TEST_CASE("no tag: both symbols give the same converse") {
    SeededRng crng(26, stream_for(StreamPurpose::Channel, 0));
    const auto ch = draw_channel(crng, 2, 3, Fading::rayleigh(), 0.0);
    const auto gp = eigen_spectrum(composite(ch, TagSymbol::Plus));
    const auto gm = eigen_spectrum(composite(ch, TagSymbol::Minus));
    SeededRng rng(26, stream_for(StreamPurpose::ConverseLaw, 0, 0));
    const auto r = converse_rate(300, gp, gm, 1.0, 1e-3, rng, 20000);
    CHECK(r.plus.log_k == r.minus.log_k);
    CHECK(std::abs(r.plus.rate_nats - r.minus.rate_nats) <
          3.0 * std::hypot(r.plus.ci_halfwidth, r.minus.ci_halfwidth) / 1.96 + 1e-12);
    CHECK(r.mixed.rate_nats == doctest::Approx(0.5 * (r.plus.rate_nats + r.minus.rate_nats)));
}

TEST_CASE("converse near capacity at n = 1000") {
    const auto s = fig1_spectra(27);
    SeededRng rng(27, stream_for(StreamPurpose::ConverseLaw, 0, 0));
    const auto r = converse_rate(1000, s.plus, s.minus, 1.0, 1e-3, rng, 20000);
    const double cap = mixed_capacity(s, 1.0);
    CAPTURE(cap);
    CAPTURE(r.mixed.rate_nats);
    CHECK(std::abs(r.mixed.rate_nats - cap) < 0.15 * cap);
    const double v = 0.5 * (dispersion(s.plus.g, waterfill(s.plus, 1.0)) + dispersion(s.minus.g, waterfill(s.minus, 1.0)));
    CHECK(r.mixed.rate_nats > cap - std::sqrt(v / 1000) * gaussian_q_inv(1e-3));
    for (const auto* part : {&r.minus, &r.plus})
        CHECK(part->rate_nats == doctest::Approx((part->log_k + std::log(2.0 * 1000) - part->log_beta) / 1000).epsilon(1e-12));
}

TEST_CASE("sandwich over seeded realizations") {
    int checked = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto s = fig1_spectra(28, k);
        const double cap = mixed_capacity(s, 1.0);
        for (int n : {100, 200, 500, 1000}) {
            SeededRng ar(28, stream_for(StreamPurpose::OutputLaw, k, 0));
            SeededRng cr(28, stream_for(StreamPurpose::ConverseLaw, k, 0));
            const auto a = achievability_rate(n, s.plus, s.minus, 1.0, 1e-3, ar, 10000);
            const auto c = converse_rate(n, s.plus, s.minus, 1.0, 1e-3, cr, 10000);
            const double slack = 3.0 * std::hypot(a.mixed.ci_halfwidth, c.mixed.ci_halfwidth) / 1.96;
            CAPTURE(k);
            CAPTURE(n);
            CHECK(a.mixed.rate_nats <= c.mixed.rate_nats + slack);
            if (n >= 200) {
                const double v = 0.5 * (dispersion(s.plus.g, waterfill(s.plus, 1.0)) +
                                        dispersion(s.minus.g, waterfill(s.minus, 1.0)));
                const double na = cap - std::sqrt(v / n) * gaussian_q_inv(1e-3);
                CHECK(c.mixed.rate_nats >= na - 3.0 * c.mixed.ci_halfwidth / 1.96);
            }
            ++checked;
        }
    }
    CHECK(checked == 80);
}
