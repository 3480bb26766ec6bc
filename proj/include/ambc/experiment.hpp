#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ambc/channel.hpp"

namespace ambc {

enum class Curve { Capacity, NormalApprox, Achievability, Converse };
enum class Aggregate { Mean, Median, Single };

std::string curve_name(Curve c);
Curve parse_curve(const std::string& name);
std::string aggregate_name(Aggregate a);
Aggregate parse_aggregate(const std::string& name);

struct ExperimentConfig {
    int t = 2;
    int r = 3;
    Fading fading = Fading::rayleigh();
    double a_coeff = 0.5;
    double snr_db = 0.0;
    std::optional<double> eps;
    std::optional<double> eps_d;
    std::vector<int> n_grid;
    int mc_samples = 100000;
    int channel_draws = 100;
    std::uint64_t seed = 1;
    std::vector<Curve> outputs = {Curve::Capacity, Curve::NormalApprox, Curve::Achievability,
                                  Curve::Converse};
    Aggregate aggregate = Aggregate::Mean;
    int threads = 1;
    double c1_delta = 0.05;

    /// Linear transmit power for unit-variance noise.
    double total_power() const;
    bool wants(Curve c) const;
};

/// Strict parse: unknown keys and out-of-range values throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

/// A CSV cell: a finite value, or NaN with a short reason.
struct Cell {
    double value = 0.0;
    std::string reason;  // empty when value is meaningful

    static Cell of(double v) { return {v, {}}; }
    static Cell missing(std::string why);
    bool ok() const { return reason.empty(); }
};

struct SweepRow {
    int n = 0;
    Cell capacity_bits;
    Cell na_bits;
    Cell ach_bits;
    Cell conv_bits;
    Cell ach_ci;
    Cell conv_ci;
    int draws = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int used_realizations = 0;
    int skipped_realizations = 0;
    /// Realization-level failures per curve (overflow, noisy tails, ...).
    int ach_failures = 0;
    int conv_failures = 0;
};

SweepResult run_sweep(const ExperimentConfig& config);

/// Per-realization quantities that do not depend on n.
struct RealizationSetup {
    ChannelRealization channel;
    EigenSpectrum plus;
    EigenSpectrum minus;
    double eps = 0.0;
};

/// Draws realization k and resolves its eps; std::nullopt when an eps_d
/// target is unreachable on that channel.
std::optional<RealizationSetup> setup_realization(const ExperimentConfig& config, int k);

/// All requested curves for one realization and blocklength, rates in bits.
struct PointValues {
    Cell capacity_bits;
    Cell na_bits;
    Cell ach_bits;
    Cell conv_bits;
    double ach_ci_bits = 0.0;
    double conv_ci_bits = 0.0;
};

PointValues evaluate_point(const ExperimentConfig& config, const RealizationSetup& setup, int k,
                           int n_index);

inline constexpr const char* kCsvHeader = "n,capacity_bits,na_bits,ach_bits,conv_bits,ach_ci,conv_ci,draws";

std::string format_cell(const Cell& c);
std::string format_row(const SweepRow& row);
void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
std::vector<SweepRow> parse_csv(const std::filesystem::path& path);

nlohmann::json sweep_metadata(const ExperimentConfig& config, const SweepResult& result);
void emit_metadata(const ExperimentConfig& config, const SweepResult& result,
                   const std::filesystem::path& path);

/// Build identifier baked in at configure time.
std::string git_describe();

}  // namespace ambc
