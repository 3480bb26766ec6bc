#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ambc/asymptotics.hpp"
#include "ambc/bounds_ach.hpp"
#include "ambc/errors.hpp"
#include "ambc/experiment.hpp"
#include "ambc/meijer.hpp"
#include "ambc/numerics.hpp"
#include "ambc/power.hpp"
#include "ambc/tag.hpp"

using namespace ambc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Overrides {
    std::string config_path;
    std::string curves;
    std::string aggregate;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int threads = 0;
    int mc_samples = 0;
    int draws = 0;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

ExperimentConfig resolve_config(const Overrides& o) {
    ExperimentConfig c = load_config(o.config_path);
    if (!o.curves.empty()) {
        c.outputs.clear();
        for (const auto& name : split_list(o.curves)) {
            const Curve curve = parse_curve(name);
            if (!c.wants(curve)) c.outputs.push_back(curve);
        }
    }
    if (!o.aggregate.empty()) c.aggregate = parse_aggregate(o.aggregate);
    if (o.has_seed) c.seed = o.seed;
    if (o.threads > 0) c.threads = o.threads;
    if (o.mc_samples > 0) c.mc_samples = o.mc_samples;
    if (o.draws > 0) c.channel_draws = o.draws;
    validate(c);
    return c;
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--curves", o.curves, "comma list of capacity,normal_approx,achievability,converse");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&o](const std::uint64_t& s) { o.seed = s; o.has_seed = true; }, "overrides the config seed");
    cmd->add_option("--aggregate", o.aggregate, "mean, median or single");
    cmd->add_option("--threads", o.threads, "worker threads");
    cmd->add_option("--mc-samples", o.mc_samples, "Monte Carlo draws per law");
    cmd->add_option("--draws", o.draws, "channel realizations");
}

int run_sweep_cmd(const Overrides& o, const std::string& out_path) {
    const ExperimentConfig cfg = resolve_config(o);
    const SweepResult result = run_sweep(cfg);
    if (out_path.empty()) {
        std::cout << kCsvHeader << '\n';
        for (const auto& row : result.rows) std::cout << format_row(row) << '\n';
    } else {
        emit_csv(result.rows, out_path);
        emit_metadata(cfg, result, out_path + ".meta.json");
    }
    std::cerr << "realizations used " << result.used_realizations << ", skipped "
              << result.skipped_realizations << ", failures ach " << result.ach_failures << " conv "
              << result.conv_failures << '\n';
    return 0;
}

int run_point_cmd(const Overrides& o, int n, double eps, int realization) {
    ExperimentConfig cfg = resolve_config(o);
    cfg.n_grid = {n};
    if (eps > 0.0) {
        cfg.eps = eps;
        cfg.eps_d.reset();
    }
    validate(cfg);
    const auto setup = setup_realization(cfg, realization);
    if (!setup) {
        std::cerr << "realization " << realization << " cannot reach the tag-error target\n";
        return kExitNumeric;
    }
    const PointValues v = evaluate_point(cfg, *setup, realization, 0);
    SweepRow row{n, v.capacity_bits, v.na_bits, v.ach_bits, v.conv_bits,
                 v.ach_bits.ok() ? Cell::of(v.ach_ci_bits) : v.ach_bits,
                 v.conv_bits.ok() ? Cell::of(v.conv_ci_bits) : v.conv_bits, 1};
    std::cout << kCsvHeader << '\n' << format_row(row) << '\n';
    std::cerr << "eps " << setup->eps << '\n';
    return 0;
}

int run_tag_convert_cmd(const Overrides& o, const std::string& targets, int realization) {
    const ExperimentConfig cfg = resolve_config(o);
    SeededRng rng(cfg.seed, stream_for(StreamPurpose::Channel, static_cast<std::uint64_t>(realization)));
    const auto ch = draw_channel(rng, cfg.t, cfg.r, cfg.fading, cfg.a_coeff);
    const TagErrorModel model = make_tag_model(composite(ch, TagSymbol::Plus));
    std::printf("# norm_h1=%.6g rho=%.6g floor=%.6g ceiling=%.6g\n", model.norm_h1, model.cross_term,
                model.floor(), model.ceiling());
    std::cout << "eps_d,eps\n";
    std::vector<double> list;
    for (const auto& t : split_list(targets)) list.push_back(std::stod(t));
    if (list.empty()) list = {1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2};
    for (double target : list) {
        char buf[64];
        try {
            std::snprintf(buf, sizeof buf, "%.6g", eps_given_tag_error(model, target));
        } catch (const InfeasibleTargetError&) {
            std::snprintf(buf, sizeof buf, "NaN(infeasible)");
        }
        std::printf("%.6g,%s\n", target, buf);
    }
    return 0;
}

// Small versions of the invariant suite; each line is one check.
int run_selftest() {
    int failed = 0;
    auto report = [&](const char* name, bool ok) {
        std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
        failed += ok ? 0 : 1;
    };
    SeededRng rng(20240601, 1);

    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
        std::vector<double> g(1 + rng.next_u32() % 4), p(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) {
            g[j] = std::exp(4 * rng.uniform() - 2);
            p[j] = std::exp(4 * rng.uniform() - 2);
        }
        PowerAllocation a;
        a.p = p;
        ok = std::abs(dispersion(g, a) - dispersion_alt(g, a)) <= 1e-12;
    }
    report("dispersion forms agree", ok);

    ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
        std::vector<double> g(1 + rng.next_u32() % 6);
        for (double& v : g) v = std::exp(6 * rng.uniform() - 3);
        const double power = std::exp(4 * rng.uniform() - 2);
        const PowerAllocation a = waterfill(g, power);
        double sum = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            sum += a.p[j];
            if (a.p[j] > 0) ok &= std::abs(a.p[j] + 1 / g[j] - a.water_level) < 1e-9 * a.water_level;
            else ok &= 1 / g[j] >= a.water_level - 1e-12;
        }
        ok &= std::abs(sum - power) < 1e-12 * std::max(1.0, power);
    }
    report("waterfilling feasible and complementary", ok);

    ok = true;
    for (int i = 0; i < 100 && ok; ++i) {
        const double g = std::exp(4 * rng.uniform() - 2), p = std::exp(2 * rng.uniform() - 1);
        ok = std::abs(verify_sigma_maximizer(g, p) - (1 + g * p)) < 1e-6;
    }
    report("sigma stationary point at 1 + g p", ok);

    ok = true;
    for (int i = 0; i < 20 && ok; ++i) {
        const auto ch = draw_channel(rng, 2, 3, Fading::rayleigh(), 0.5);
        const TagErrorModel m = make_tag_model(composite(ch, TagSymbol::Plus));
        const double e = rng.uniform();
        ok = std::abs(eps_given_tag_error(m, tag_error_given_eps(m, e)) - e) < 1e-12;
    }
    report("tag map round trip", ok);

    ok = true;
    for (double x = -6.0; x <= 6.0 && ok; x += 0.25) {
        const double q = gaussian_q(x);
        ok = std::abs(gaussian_q_inv(q) - x) < 1e-9 + 2e-16 / std::exp(-0.5 * x * x - 0.9189385332046727);
    }
    report("Q inverse round trip", ok);

    {
        const int samples = 20000;
        PowerAllocation a;
        a.p = {1.0};
        const auto h = sample_info_density(DensityKind::UnderConditional, 10, {{1.0}, TagSymbol::Plus}, a, rng, samples);
        const auto b = achievability_beta(h, h, 0.1, 0.05);
        report("beta of a law against itself", std::abs(b.beta - 0.95) < 2.0 / std::sqrt(samples));
    }

    {
        double integral = 0.0;
        const int steps = 4000;
        const double lo = -15.0, hi = 6.0, du = (hi - lo) / steps;
        for (int i = 0; i < steps; ++i) {
            const double z = std::exp(lo + (i + 0.5) * du);
            integral += product_gamma_pdf(z, 2, 3, 0.5) * z * du;
        }
        report("product-gamma density integrates to one", std::abs(integral - 1.0) < 1e-3);
    }

    std::printf("%d failed\n", failed);
    return failed == 0 ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-blocklength bounds for MIMO ambient backscatter"};
    app.require_subcommand(1);

    Overrides o;
    std::string out_path;
    auto* sweep = app.add_subcommand("sweep", "rate-vs-blocklength table as CSV");
    add_common(sweep, o);
    sweep->add_option("--out", out_path, "CSV path; a .meta.json sidecar is written next to it");

    int n = 0;
    double eps = 0.0;
    int realization = 0;
    auto* point = app.add_subcommand("point", "one (n, eps) evaluation on one realization");
    add_common(point, o);
    point->add_option("--n", n, "blocklength")->required();
    point->add_option("--eps", eps, "overrides eps / eps_d");
    point->add_option("--realization", realization, "channel realization index");

    std::string targets;
    auto* tag = app.add_subcommand("tag-convert", "eps_d to eps table for a seeded channel");
    add_common(tag, o);
    tag->add_option("--targets", targets, "comma list of eps_d values");
    tag->add_option("--realization", realization, "channel realization index");

    auto* selftest = app.add_subcommand("selftest", "quick invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*sweep) return run_sweep_cmd(o, out_path);
        if (*point) return run_point_cmd(o, n, eps, realization);
        if (*tag) return run_tag_convert_cmd(o, targets, realization);
        if (*selftest) return run_selftest();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const ConvergenceError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const NumericOverflowError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const InsufficientSamplesError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const InfeasibleTargetError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
