#include "ambc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <mutex>
#include <thread>

#include "ambc/asymptotics.hpp"
#include "ambc/bounds_ach.hpp"
#include "ambc/bounds_conv.hpp"
#include "ambc/errors.hpp"
#include "ambc/power.hpp"
#include "ambc/rng.hpp"
#include "ambc/tag.hpp"

#ifndef AMBC_GIT_DESCRIBE
#define AMBC_GIT_DESCRIBE "unknown"
#endif

namespace ambc {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string> kKnownKeys = {
    "t",           "r",         "fading",     "k_factor_db", "a_coeff", "snr_db",
    "eps",         "eps_d",     "n_grid",     "mc_samples",  "channel_draws",
    "seed",        "outputs",   "aggregate",  "threads",     "c1_delta", "description"};

template <typename T>
T get_as(const json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

int get_int(const json& doc, const char* key) {
    const json& v = doc.at(key);
    if (!v.is_number_integer()) throw ConfigError(std::string("config key '") + key + "' must be an integer");
    return get_as<int>(doc, key);
}

double get_real(const json& doc, const char* key) {
    const json& v = doc.at(key);
    if (!v.is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
    return v.get<double>();
}

std::string failure_reason(const std::exception& e) {
    if (dynamic_cast<const NumericOverflowError*>(&e)) return "overflow";
    if (dynamic_cast<const InsufficientSamplesError*>(&e)) return "insufficient-samples";
    if (dynamic_cast<const ConvergenceError*>(&e)) return "no-convergence";
    return "error";
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

struct Accumulator {
    std::vector<double> values;
    std::vector<double> cis;
    std::string first_failure;
    int failures = 0;

    void add(const Cell& c, double ci) {
        if (c.ok()) {
            values.push_back(c.value);
            cis.push_back(ci);
        } else {
            ++failures;
            if (first_failure.empty()) first_failure = c.reason;
        }
    }

    Cell value(Aggregate how) const {
        if (values.empty()) return Cell::missing(first_failure.empty() ? "no-draws" : first_failure);
        if (how == Aggregate::Median) return Cell::of(median_of(values));
        double acc = 0.0;
        for (double v : values) acc += v;
        return Cell::of(acc / static_cast<double>(values.size()));
    }

    Cell ci() const {
        if (values.empty()) return Cell::missing(first_failure.empty() ? "no-draws" : first_failure);
        double acc = 0.0;
        for (double c : cis) acc += c * c;
        return Cell::of(std::sqrt(acc) / static_cast<double>(cis.size()));
    }
};

Cell parse_cell(const std::string& text) {
    if (text.rfind("NaN", 0) == 0) {
        std::string reason = "unspecified";
        const auto open = text.find('(');
        const auto close = text.rfind(')');
        if (open != std::string::npos && close != std::string::npos && close > open)
            reason = text.substr(open + 1, close - open - 1);
        return {kNaN, reason};
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return Cell::of(v);
    } catch (const std::exception&) {
        throw ConfigError("parse_csv: malformed cell '" + text + "'");
    }
}

}  // namespace

std::string curve_name(Curve c) {
    switch (c) {
        case Curve::Capacity: return "capacity";
        case Curve::NormalApprox: return "normal_approx";
        case Curve::Achievability: return "achievability";
        case Curve::Converse: return "converse";
    }
    return "unknown";
}

Curve parse_curve(const std::string& name) {
    for (Curve c : {Curve::Capacity, Curve::NormalApprox, Curve::Achievability, Curve::Converse})
        if (curve_name(c) == name) return c;
    throw ConfigError("unknown curve '" + name + "'");
}

std::string aggregate_name(Aggregate a) {
    switch (a) {
        case Aggregate::Mean: return "mean";
        case Aggregate::Median: return "median";
        case Aggregate::Single: return "single";
    }
    return "unknown";
}

Aggregate parse_aggregate(const std::string& name) {
    for (Aggregate a : {Aggregate::Mean, Aggregate::Median, Aggregate::Single})
        if (aggregate_name(a) == name) return a;
    throw ConfigError("unknown aggregate '" + name + "'");
}

double ExperimentConfig::total_power() const { return std::pow(10.0, snr_db / 10.0); }

bool ExperimentConfig::wants(Curve c) const {
    return std::find(outputs.begin(), outputs.end(), c) != outputs.end();
}

void validate(const ExperimentConfig& c) {
    if (c.t < 1 || c.r < 1) throw ConfigError("t and r must be >= 1");
    if (std::min(c.t, c.r) > 8) throw ConfigError("min(t, r) must be <= 8");
    if (!std::isfinite(c.fading.k_factor_db)) throw ConfigError("k_factor_db must be finite");
    if (!(c.a_coeff >= 0.0 && c.a_coeff <= 1.0)) throw ConfigError("a_coeff must lie in [0, 1]");
    if (!std::isfinite(c.snr_db)) throw ConfigError("snr_db must be finite");
    if (c.eps.has_value() == c.eps_d.has_value()) throw ConfigError("exactly one of eps, eps_d must be set");
    const double target = c.eps ? *c.eps : *c.eps_d;
    if (!(target > 0.0 && target < 1.0)) throw ConfigError("eps / eps_d must lie in (0, 1)");
    if (c.n_grid.empty()) throw ConfigError("n_grid must not be empty");
    for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
        if (c.n_grid[i] < 8) throw ConfigError("n_grid entries must be >= 8");
        if (c.n_grid[i] > 4096) throw ConfigError("n_grid entries must be <= 4096");
        if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
    }
    if (c.mc_samples < 1000) throw ConfigError("mc_samples must be >= 1000");
    if (c.channel_draws < 1) throw ConfigError("channel_draws must be >= 1");
    if (c.outputs.empty()) throw ConfigError("outputs must name at least one curve");
    if (c.threads < 1) throw ConfigError("threads must be >= 1");
    if (!(c.c1_delta > 0.0)) throw ConfigError("c1_delta must be > 0");
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");

    ExperimentConfig c;
    if (doc.contains("t")) c.t = get_int(doc, "t");
    if (doc.contains("r")) c.r = get_int(doc, "r");
    if (doc.contains("fading")) {
        const auto kind = get_as<std::string>(doc, "fading");
        if (kind == "rayleigh") c.fading = Fading::rayleigh();
        else if (kind == "rician") c.fading = Fading::rician(0.0);
        else throw ConfigError("fading must be 'rayleigh' or 'rician'");
    }
    if (doc.contains("k_factor_db")) {
        if (c.fading.kind != FadingKind::Rician) throw ConfigError("k_factor_db requires rician fading");
        c.fading.k_factor_db = get_real(doc, "k_factor_db");
    } else if (c.fading.kind == FadingKind::Rician) {
        throw ConfigError("rician fading requires k_factor_db");
    }
    if (doc.contains("a_coeff")) c.a_coeff = get_real(doc, "a_coeff");
    if (doc.contains("snr_db")) c.snr_db = get_real(doc, "snr_db");
    if (doc.contains("eps")) c.eps = get_real(doc, "eps");
    if (doc.contains("eps_d")) c.eps_d = get_real(doc, "eps_d");
    if (doc.contains("n_grid")) {
        const json& grid = doc.at("n_grid");
        if (!grid.is_array()) throw ConfigError("n_grid must be an array");
        for (const json& v : grid) {
            if (!v.is_number_integer()) throw ConfigError("n_grid entries must be integers");
            c.n_grid.push_back(v.get<int>());
        }
    }
    if (doc.contains("mc_samples")) c.mc_samples = get_int(doc, "mc_samples");
    if (doc.contains("channel_draws")) c.channel_draws = get_int(doc, "channel_draws");
    if (doc.contains("seed")) {
        const json& s = doc.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw ConfigError("seed must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("outputs")) {
        const json& outs = doc.at("outputs");
        if (!outs.is_array()) throw ConfigError("outputs must be an array");
        c.outputs.clear();
        for (const json& v : outs) {
            if (!v.is_string()) throw ConfigError("outputs entries must be strings");
            const Curve curve = parse_curve(v.get<std::string>());
            if (!c.wants(curve)) c.outputs.push_back(curve);
        }
    }
    if (doc.contains("aggregate")) c.aggregate = parse_aggregate(get_as<std::string>(doc, "aggregate"));
    if (doc.contains("threads")) c.threads = get_int(doc, "threads");
    if (doc.contains("c1_delta")) c.c1_delta = get_real(doc, "c1_delta");
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

json config_to_json(const ExperimentConfig& c) {
    json doc;
    doc["t"] = c.t;
    doc["r"] = c.r;
    doc["fading"] = c.fading.kind == FadingKind::Rician ? "rician" : "rayleigh";
    if (c.fading.kind == FadingKind::Rician) doc["k_factor_db"] = c.fading.k_factor_db;
    doc["a_coeff"] = c.a_coeff;
    doc["snr_db"] = c.snr_db;
    if (c.eps) doc["eps"] = *c.eps;
    if (c.eps_d) doc["eps_d"] = *c.eps_d;
    doc["n_grid"] = c.n_grid;
    doc["mc_samples"] = c.mc_samples;
    doc["channel_draws"] = c.channel_draws;
    doc["seed"] = c.seed;
    json outs = json::array();
    for (Curve curve : c.outputs) outs.push_back(curve_name(curve));
    doc["outputs"] = outs;
    doc["aggregate"] = aggregate_name(c.aggregate);
    doc["threads"] = c.threads;
    doc["c1_delta"] = c.c1_delta;
    return doc;
}

Cell Cell::missing(std::string why) { return {kNaN, std::move(why)}; }

std::optional<RealizationSetup> setup_realization(const ExperimentConfig& config, int k) {
    SeededRng rng(config.seed, stream_for(StreamPurpose::Channel, static_cast<std::uint64_t>(k)));
    RealizationSetup s{draw_channel(rng, config.t, config.r, config.fading, config.a_coeff), {}, {}, 0.0};
    s.plus = eigen_spectrum(composite(s.channel, TagSymbol::Plus));
    s.minus = eigen_spectrum(composite(s.channel, TagSymbol::Minus));
    if (config.eps) {
        s.eps = *config.eps;
        return s;
    }
    try {
        const TagErrorModel model = make_tag_model(composite(s.channel, TagSymbol::Plus));
        s.eps = eps_given_tag_error(model, *config.eps_d);
    } catch (const InfeasibleTargetError&) {
        return std::nullopt;
    } catch (const DomainError&) {
        return std::nullopt;
    }
    if (!(s.eps > 0.0 && s.eps < 1.0)) return std::nullopt;
    return s;
}

PointValues evaluate_point(const ExperimentConfig& config, const RealizationSetup& setup, int k,
                           int n_index) {
    const int n = config.n_grid.at(static_cast<std::size_t>(n_index));
    const double power = config.total_power();
    const auto kk = static_cast<std::uint64_t>(k);
    const auto ni = static_cast<std::uint64_t>(n_index);
    PointValues out;
    out.capacity_bits = Cell::missing("not-requested");
    out.na_bits = Cell::missing("not-requested");
    out.ach_bits = Cell::missing("not-requested");
    out.conv_bits = Cell::missing("not-requested");

    if (config.wants(Curve::Capacity) || config.wants(Curve::NormalApprox)) {
        double cap = 0.0;
        double na = 0.0;
        for (const EigenSpectrum* g : {&setup.minus, &setup.plus}) {
            const PowerAllocation alloc = waterfill(*g, power);
            const double c = capacity(g->g, alloc);
            cap += 0.5 * c;
            na += 0.5 * normal_approximation(c, dispersion(g->g, alloc), n, setup.eps).rate_nats;
        }
        if (config.wants(Curve::Capacity)) out.capacity_bits = Cell::of(cap / std::numbers::ln2);
        if (config.wants(Curve::NormalApprox)) out.na_bits = Cell::of(na / std::numbers::ln2);
    }
    if (config.wants(Curve::Achievability)) {
        try {
            SeededRng rng(config.seed, stream_for(StreamPurpose::OutputLaw, kk, ni));
            AchievabilityOptions opts;
            opts.c1_delta = config.c1_delta;
            const auto res = achievability_rate(n, setup.plus, setup.minus, power, setup.eps, rng,
                                                config.mc_samples, opts);
            out.ach_bits = Cell::of(res.mixed.rate_bits);
            out.ach_ci_bits = res.mixed.ci_halfwidth / std::numbers::ln2;
        } catch (const std::runtime_error& e) {
            out.ach_bits = Cell::missing(failure_reason(e));
        }
    }
    if (config.wants(Curve::Converse)) {
        try {
            SeededRng rng(config.seed, stream_for(StreamPurpose::ConverseLaw, kk, ni));
            const auto res =
                converse_rate(n, setup.plus, setup.minus, power, setup.eps, rng, config.mc_samples);
            out.conv_bits = Cell::of(res.mixed.rate_bits);
            out.conv_ci_bits = res.mixed.ci_halfwidth / std::numbers::ln2;
        } catch (const std::runtime_error& e) {
            out.conv_bits = Cell::missing(failure_reason(e));
        }
    }
    return out;
}

SweepResult run_sweep(const ExperimentConfig& config) {
    validate(config);
    std::vector<std::pair<int, RealizationSetup>> used;
    SweepResult result;
    for (int k = 0; k < config.channel_draws; ++k) {
        auto s = setup_realization(config, k);
        if (!s) {
            ++result.skipped_realizations;
            continue;
        }
        used.emplace_back(k, std::move(*s));
        if (config.aggregate == Aggregate::Single) break;
    }
    result.used_realizations = static_cast<int>(used.size());

    const std::size_t grid = config.n_grid.size();
    const std::size_t tasks = used.size() * grid;
    std::vector<PointValues> values(tasks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= tasks) return;
            const std::size_t u = task / grid;
            const std::size_t ni = task % grid;
            try {
                values[task] = evaluate_point(config, used[u].second, used[u].first, static_cast<int>(ni));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int nthreads = std::max(1, std::min<int>(config.threads, static_cast<int>(std::max<std::size_t>(tasks, 1))));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t ni = 0; ni < grid; ++ni) {
        Accumulator cap, na, ach, conv;
        for (std::size_t u = 0; u < used.size(); ++u) {
            const PointValues& v = values[u * grid + ni];
            cap.add(v.capacity_bits, 0.0);
            na.add(v.na_bits, 0.0);
            ach.add(v.ach_bits, v.ach_ci_bits);
            conv.add(v.conv_bits, v.conv_ci_bits);
        }
        SweepRow row;
        row.n = config.n_grid[ni];
        row.capacity_bits = config.wants(Curve::Capacity) ? cap.value(config.aggregate) : Cell::missing("not-requested");
        row.na_bits = config.wants(Curve::NormalApprox) ? na.value(config.aggregate) : Cell::missing("not-requested");
        if (config.wants(Curve::Achievability)) {
            row.ach_bits = ach.value(config.aggregate);
            row.ach_ci = ach.ci();
            result.ach_failures += ach.failures;
        } else {
            row.ach_bits = row.ach_ci = Cell::missing("not-requested");
        }
        if (config.wants(Curve::Converse)) {
            row.conv_bits = conv.value(config.aggregate);
            row.conv_ci = conv.ci();
            result.conv_failures += conv.failures;
        } else {
            row.conv_bits = row.conv_ci = Cell::missing("not-requested");
        }
        row.draws = result.used_realizations;
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::string format_cell(const Cell& c) {
    if (!c.ok()) return "NaN(" + c.reason + ")";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", c.value);
    return buf;
}

std::string format_row(const SweepRow& row) {
    std::ostringstream out;
    out << row.n << ',' << format_cell(row.capacity_bits) << ',' << format_cell(row.na_bits) << ','
        << format_cell(row.ach_bits) << ',' << format_cell(row.conv_bits) << ','
        << format_cell(row.ach_ci) << ',' << format_cell(row.conv_ci) << ',' << row.draws;
    return out.str();
}

void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path.string() + " for writing");
    out << kCsvHeader << '\n';
    for (const SweepRow& row : rows) out << format_row(row) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path.string());
}

std::vector<SweepRow> parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw ConfigError("parse_csv: unexpected header in " + path.string());
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 8) throw ConfigError("parse_csv: expected 8 fields in '" + line + "'");
        SweepRow row;
        row.n = std::stoi(fields[0]);
        row.capacity_bits = parse_cell(fields[1]);
        row.na_bits = parse_cell(fields[2]);
        row.ach_bits = parse_cell(fields[3]);
        row.conv_bits = parse_cell(fields[4]);
        row.ach_ci = parse_cell(fields[5]);
        row.conv_ci = parse_cell(fields[6]);
        row.draws = std::stoi(fields[7]);
        rows.push_back(std::move(row));
    }
    return rows;
}

json sweep_metadata(const ExperimentConfig& config, const SweepResult& result) {
    json meta;
    meta["config"] = config_to_json(config);
    meta["seed"] = config.seed;
    meta["git_describe"] = git_describe();
    meta["used_realizations"] = result.used_realizations;
    meta["skipped_realizations"] = result.skipped_realizations;
    meta["achievability_failures"] = result.ach_failures;
    meta["converse_failures"] = result.conv_failures;
    meta["csv_header"] = kCsvHeader;
    return meta;
}

void emit_metadata(const ExperimentConfig& config, const SweepResult& result,
                   const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_metadata: cannot open " + path.string() + " for writing");
    out << sweep_metadata(config, result).dump(2) << '\n';
    if (!out) throw std::runtime_error("emit_metadata: write failed for " + path.string());
}

std::string git_describe() { return AMBC_GIT_DESCRIBE; }

}  // namespace ambc
