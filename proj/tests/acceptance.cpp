// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. argv[1] is the CLI executable.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ambc/asymptotics.hpp"
#include "ambc/bounds_ach.hpp"
#include "ambc/bounds_conv.hpp"
#include "ambc/experiment.hpp"
#include "ambc/meijer.hpp"
#include "ambc/numerics.hpp"
#include "ambc/tag.hpp"
#include "oracles.hpp"

using namespace ambc;

namespace {

int g_failed = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("criterion %d %s: %s [%s]\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failed;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

ExperimentConfig base_config(bool rician) {
    ExperimentConfig c;
    c.t = 2;
    c.r = 3;
    c.fading = rician ? Fading::rician(10.0) : Fading::rayleigh();
    c.a_coeff = 0.5;
    c.snr_db = 0.0;
    c.eps = 1e-3;
    c.n_grid = {100};
    c.seed = 1;
    return c;
}

struct ModeSummary {
    double cap_plus, cap_minus, v_plus, v_minus;
};

std::vector<ModeSummary> summaries(const ExperimentConfig& cfg, int draws) {
    std::vector<ModeSummary> out;
    for (int k = 0; k < draws; ++k) {
        const auto s = setup_realization(cfg, k);
        const auto ap = waterfill(s->plus, cfg.total_power());
        const auto am = waterfill(s->minus, cfg.total_power());
        out.push_back({capacity(s->plus.g, ap), capacity(s->minus.g, am), dispersion(s->plus.g, ap),
                       dispersion(s->minus.g, am)});
    }
    return out;
}

double mean_capacity_bits(const std::vector<ModeSummary>& ms) {
    double acc = 0.0;
    for (const auto& m : ms) acc += 0.5 * (m.cap_plus + m.cap_minus);
    return acc / static_cast<double>(ms.size()) / std::numbers::ln2;
}

void capacity_criterion(int id, bool rician, double target) {
    const auto start = std::chrono::steady_clock::now();
    const auto ms = summaries(base_config(rician), 1000);
    const double cap = mean_capacity_bits(ms);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(id, std::abs(cap - target) <= 0.1 && secs <= 60.0,
           std::string("mean capacity over 1000 ") + (rician ? "Rician K=10 dB" : "Rayleigh") +
               " draws within 0.1 of " + fmt("%.2f", target) + " bits",
           fmt("got %.4f bits in %.2f s", cap, secs));
}

// First n at which the draw-averaged normal approximation reaches 0.9 of the
// draw-averaged capacity.
int crossing(const std::vector<ModeSummary>& ms, double eps) {
    double cap = 0.0;
    for (const auto& m : ms) cap += 0.5 * (m.cap_plus + m.cap_minus);
    cap /= static_cast<double>(ms.size());
    const double qi = gaussian_q_inv(eps);
    for (int n = 1; n <= 100000; ++n) {
        double na = 0.0;
        for (const auto& m : ms)
            na += 0.5 * (m.cap_plus - std::sqrt(m.v_plus / n) * qi) + 0.5 * (m.cap_minus - std::sqrt(m.v_minus / n) * qi);
        na /= static_cast<double>(ms.size());
        if (na >= 0.9 * cap) return n;
    }
    return -1;
}

void crossing_criterion() {
    const int ray = crossing(summaries(base_config(false), 1000), 1e-3);
    const int ric = crossing(summaries(base_config(true), 1000), 1e-3);
    report(3, std::abs(ray - 300) <= 100 && std::abs(ric - 200) <= 100,
           "normal approximation reaches 0.9 C at n = 300 +- 100 (Rayleigh) and 200 +- 100 (Rician)",
           fmt("Rayleigh n=%.0f, Rician n=%.0f", ray, ric));
}

void sandwich_criterion() {
    ExperimentConfig cfg = base_config(false);
    cfg.n_grid = {100, 200, 500, 1000, 2000};
    cfg.mc_samples = 100000;
    const int draws = 20;
    const std::size_t grid = cfg.n_grid.size();
    std::vector<RealizationSetup> setups;
    for (int k = 0; k < draws; ++k) setups.push_back(*setup_realization(cfg, k));
    std::vector<PointValues> values(draws * grid);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t task; (task = next.fetch_add(1)) < values.size();)
            values[task] = evaluate_point(cfg, setups[task / grid], static_cast<int>(task / grid),
                                          static_cast<int>(task % grid));
    };
    std::vector<std::thread> pool;
    const unsigned threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    int ordered = 0, total = 0, between = 0, na_cases = 0, missing = 0;
    double worst = -1e300;
    for (std::size_t task = 0; task < values.size(); ++task) {
        const PointValues& v = values[task];
        if (!v.ach_bits.ok() || !v.conv_bits.ok()) {
            ++missing;
            continue;
        }
        ++total;
        const double slack = v.ach_ci_bits + v.conv_ci_bits;
        worst = std::max(worst, v.ach_bits.value - v.conv_bits.value - slack);
        if (v.ach_bits.value <= v.conv_bits.value + slack) ++ordered;
        if (cfg.n_grid[task % grid] >= 300) {
            ++na_cases;
            if (v.ach_bits.value <= v.na_bits.value && v.na_bits.value <= v.conv_bits.value) ++between;
        }
    }
    const bool ok = missing == 0 && ordered == total && na_cases > 0 && between >= 0.8 * na_cases;
    report(4, ok, "achievability <= converse on 20 realizations x 5 blocklengths; normal approximation between for n >= 300 in >= 80%",
           fmt("ordered %.0f/%.0f, between %.0f/%.0f", ordered, total, between, na_cases) +
               fmt(", missing %.0f, worst margin %.3g bits", missing, worst));
}

void oracle_criterion() {
    bool ok = true;
    std::ostringstream detail;
    for (double x : {0.5, 1.0, 4.0}) {
        const auto tg = per_use_term(DensityKind::UnderOutput, x);
        const auto th = per_use_term(DensityKind::UnderConditional, x);
        const EigenSpectrum g{{x}, TagSymbol::Plus};
        PowerAllocation p;
        p.p = {1.0};
        p.total_power = 1.0;
        const int samples = 100000;

        const double eps = 0.1, tau = 0.05;
        const double gamma = oracle::single_use_threshold(th.alpha, th.q, th.ell, 1 - eps + tau);
        const double ach_exact = oracle::single_use_tail(tg.alpha, tg.q, tg.ell, gamma);
        SeededRng a(500, 1), b(500, 2);
        const auto gl = sample_info_density(DensityKind::UnderOutput, 1, g, p, a, samples);
        const auto hl = sample_info_density(DensityKind::UnderConditional, 1, g, p, b, samples);
        const auto ach = achievability_beta(gl, hl, eps, tau);
        const double za = std::abs(ach.beta - ach_exact) / ach.std_error;

        const double eta = oracle::single_use_threshold(th.alpha, th.q, th.ell, 1 - eps);
        const double conv_exact = oracle::single_use_tail(tg.alpha, tg.q, tg.ell, eta);
        SeededRng c(500, 3);
        const auto cb = np_beta_converse(sample_converse_density(1, g, p, c, samples), eps);
        const double zc = std::abs(cb.beta - conv_exact) / (cb.rel_se * cb.beta);

        ok = ok && za < 3.0 && zc < 3.0;
        detail << fmt(x == 0.5 ? "x=%.1f ach %.2f se conv %.2f se" : "; x=%.1f ach %.2f se conv %.2f se", x, za, zc);
    }
    report(5, ok, "n=1 beta estimators match quadrature within 3 standard errors", detail.str());
}

void identity_criterion() {
    SeededRng rng(600, 1);
    int bad_disp = 0, bad_wf = 0, bad_sigma = 0, bad_tag = 0;
    for (int i = 0; i < 10000; ++i) {
        const int m = 1 + static_cast<int>(rng.next_u32() % 8);
        std::vector<double> g(m), pv(m);
        for (int j = 0; j < m; ++j) {
            g[j] = std::exp(6.0 * rng.uniform() - 3.0);
            pv[j] = std::exp(6.0 * rng.uniform() - 3.0);
        }
        PowerAllocation a;
        a.p = pv;
        if (std::abs(dispersion(g, a) - dispersion_alt(g, a)) > 1e-12) ++bad_disp;

        const double power = std::exp(5.0 * rng.uniform() - 3.0);
        const auto w = waterfill(g, power);
        double total = 0.0;
        bool ok = true;
        for (int j = 0; j < m; ++j) {
            total += w.p[j];
            ok = ok && w.p[j] >= 0.0;
            if (w.p[j] > 0.0) ok = ok && std::abs(w.water_level - 1.0 / g[j] - w.p[j]) <= 1e-12 * std::max(1.0, w.water_level);
            else ok = ok && w.water_level <= 1.0 / g[j] + 1e-12;
        }
        ok = ok && std::abs(total - power) <= 1e-9 * std::max(1.0, power);
        if (!ok) ++bad_wf;
    }
    for (int i = 0; i < 100; ++i) {
        const double g = std::exp(4.0 * rng.uniform() - 2.0), p = std::exp(4.0 * rng.uniform() - 2.0);
        if (std::abs(verify_sigma_maximizer(g, p) - (1 + g * p)) > 1e-6) ++bad_sigma;
    }
    for (int i = 0; i < 100; ++i) {
        const auto ch = draw_channel(rng, 2, 3, Fading::rayleigh(), 0.5);
        const auto model = make_tag_model(composite(ch, TagSymbol::Plus));
        const double e = rng.uniform();
        if (std::abs(eps_given_tag_error(model, tag_error_given_eps(model, e)) - e) > 1e-12) ++bad_tag;
    }
    const int samples = 100000;
    SeededRng hr(600, 2);
    PowerAllocation p1;
    p1.p = {1.0};
    const auto h = sample_info_density(DensityKind::UnderConditional, 10, {{1.0}, TagSymbol::Plus}, p1, hr, samples);
    const double beta = achievability_beta(h, h, 0.1, 0.05).beta;
    const bool beta_ok = std::abs(beta - 0.95) <= 2.0 / std::sqrt(samples);
    report(6, bad_disp + bad_wf + bad_sigma + bad_tag == 0 && beta_ok,
           "dispersion forms, waterfilling, sigma stationary point, tag round trip, beta(P,P)",
           fmt("failures disp %.0f wf %.0f sigma %.0f tag %.0f", bad_disp, bad_wf, bad_sigma, bad_tag) +
               fmt(", beta(P,P)=%.5f", beta));
}

void meijer_criterion() {
    const int copies = 2, shape = 3;
    const double theta = 1.0;
    SeededRng rng(700, 1);
    const int draws = 1000000;
    const int bins = 20;
    const double lo = 0.0, hi = 30.0, width = (hi - lo) / bins;
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < draws; ++i) {
        const double z = rng.gamma(shape) * rng.gamma(shape) * theta * theta;
        const int b = static_cast<int>((z - lo) / width);
        if (b >= 0 && b < bins) ++counts[b];
    }
    double worst = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double a = lo + b * width;
        const double mass = oracle::integrate([&](double z) { return z > 0 ? product_gamma_pdf(z, copies, shape, theta) : 0.0; }, a, a + width);
        const double p = static_cast<double>(counts[b]) / draws;
        const double se = std::sqrt(std::max(mass * (1 - mass), 1e-300) / draws);
        worst = std::max(worst, std::abs(p - mass) / se);
    }
    const double total = oracle::integrate([&](double u) {
        const double z = std::exp(u);
        return product_gamma_pdf(z, copies, shape, theta) * z;
    }, -30.0, 6.0);
    double single = 0.0;
    for (double z : {0.5, 1.0, 3.0, 7.5}) {
        const double closed = oracle::gamma_pdf(z, 3, 1.5);
        single = std::max(single, std::abs(product_gamma_pdf(z, 1, 3, 1.5) - closed) / closed);
    }
    report(7, worst < 3.0 && std::abs(total - 1.0) <= 1e-3 && single <= 1e-6,
           "product-gamma density: 10^6-draw histogram within 3 se per bin, unit mass, single-factor reduction",
           fmt("worst bin %.2f se, mass %.6f, single-factor rel err %.2g", worst, total, single));
}

void determinism_criterion(const char* cli) {
    if (cli == nullptr) {
        report(8, false, "two sweeps with one config give byte-identical CSV", "no CLI path given");
        return;
    }
    const auto dir = std::filesystem::temp_directory_path() / "ambc_acceptance";
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "config.json";
    std::ofstream(cfg) << R"({"t": 2, "r": 3, "fading": "rayleigh", "a_coeff": 0.5, "snr_db": 0.0,
        "eps": 0.001, "n_grid": [100, 400, 1000], "mc_samples": 20000, "channel_draws": 4,
        "seed": 7, "threads": 4})";
    auto run = [&](const std::string& name) {
        const auto out = dir / name;
        const std::string cmd = std::string("\"") + cli + "\" sweep --config \"" + cfg.string() + "\" --out \"" +
                                out.string() + "\" 2>/dev/null";
        const int rc = std::system(cmd.c_str());
        std::ifstream in(out, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return std::make_pair(rc, s.str());
    };
    const auto a = run("a.csv");
    const auto b = run("b.csv");
    const bool ok = a.first == 0 && b.first == 0 && !a.second.empty() && a.second == b.second &&
                    a.second.rfind(kCsvHeader, 0) == 0;
    report(8, ok, "two sweeps with one config give byte-identical CSV",
           fmt("exit codes %.0f/%.0f, %.0f bytes", a.first, b.first, static_cast<double>(a.second.size())));
}

void mrc_criterion() {
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        SeededRng crng(900, stream_for(StreamPurpose::Channel, k));
        const auto ch = draw_channel(crng, 2, 3, Fading::rayleigh(), 0.5);
        const auto model = make_tag_model(composite(ch, TagSymbol::Plus));
        const double eps = 0.05 + 0.9 * static_cast<double>(k) / 19.0;
        const double analytic = tag_error_given_eps(model, eps);
        SeededRng srng(900, stream_for(StreamPurpose::TagSimulation, k));
        const auto sim = simulate_tag_error(model, eps, srng, 100000);
        const double se = std::sqrt(analytic * (1 - analytic) / static_cast<double>(sim.trials));
        worst = std::max(worst, std::abs(sim.error_rate - analytic) / se);
    }
    report(9, worst < 3.0, "MRC tag error over 10^5 trials matches the analytic map within 3 se on 20 channels",
           fmt("worst %.2f se", worst));
}

}  // namespace

int main(int argc, char** argv) {
    capacity_criterion(1, false, 1.83);
    capacity_criterion(2, true, 2.09);
    crossing_criterion();
    sandwich_criterion();
    oracle_criterion();
    identity_criterion();
    meijer_criterion();
    determinism_criterion(argc > 1 ? argv[1] : nullptr);
    mrc_criterion();
    std::printf("%d of 9 criteria failed\n", g_failed);
    return g_failed == 0 ? 0 : 1;
}
