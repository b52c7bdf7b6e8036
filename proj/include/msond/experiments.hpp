#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msond/channel.hpp"
#include "msond/parallel.hpp"

namespace msond {

enum class ExperimentKind { til_decay, rate_vs_snr, rate_vs_n, rate_vs_rsinr, lookup_table, dist_check };

std::string_view to_string(ExperimentKind kind) noexcept;
/// CLI subcommand names: til-decay, rate-vs-snr, rate-vs-n, rate-vs-rsinr, lookup, dist-check.
ExperimentKind parse_kind(std::string_view text);

/// One (mode, S) combination competing in the lookup table.
struct Strategy {
    Mode mode;
    std::size_t streams;

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::rate_vs_snr;
    NetworkConfig base;
    /// N values (til-decay, rate-vs-n, lookup), snr in dB (rate-vs-snr) or
    /// RSINR in dB (rate-vs-rsinr). Unused by dist-check.
    std::vector<double> sweep;
    std::vector<Mode> modes;
    std::vector<Strategy> strategies;  // lookup only
    std::vector<double> snr_grid_db;   // lookup only
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::string out;   // CSV path; empty: stdout
    std::string json;  // summary path; empty: derived from `out`

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// One CSV row.
struct SweepPoint {
    std::string sweep_param;  // "N", "snr_db" or "rsinr_db"
    double value = 0.0;
    Mode mode = Mode::alternate;
    std::size_t streams = 1;
    double mean_sum_rate = 0.0;
    double stderr_sum_rate = 0.0;
    double mean_til_last = 0.0;      // NaN when the mode has no Pi2
    double mean_til_selected = 0.0;  // JSON only
    std::size_t discarded = 0;
    std::size_t trials = 0;
};

struct LookupCell {
    std::size_t relays;
    double snr_db;
    Strategy best;
    double t_max;
    std::vector<double> mean_rates;  // parallel to the strategy list
};

/// Snr (dB) above which `to` replaces `from` as the best strategy at `relays`.
struct RegimeBoundary {
    std::size_t relays;
    Strategy from;
    Strategy to;
    double snr_db;
};

struct LookupTable {
    std::vector<Strategy> strategies;
    std::vector<LookupCell> cells;
    std::vector<RegimeBoundary> boundaries;
    std::size_t discarded = 0;
};

struct DistCheckRow {
    std::string stage;  // "stage1" or "stage2"
    std::size_t shape;
    std::size_t samples;
    double ks_distance;
};

struct SweepResult {
    ExperimentSpec spec;
    std::vector<SweepPoint> points;
    std::optional<LookupTable> lookup;
    std::vector<DistCheckRow> dist;
    std::string version;
    double wall_seconds = 0.0;
};

/// Runs `trials` independent blocks per sweep point. Every trial draws from
/// derive_stream(seed, point, trial), so output does not depend on the
/// worker count.
SweepResult run_experiment(const ExperimentSpec& spec);

LookupTable build_lookup_table(const NetworkConfig& base, const std::vector<double>& relay_counts,
                               const std::vector<double>& snr_grid_db, const std::vector<Strategy>& strategies,
                               std::size_t trials, std::uint64_t seed, std::size_t workers);

/// Header of the sweep CSV; the column set and order are fixed.
inline constexpr std::string_view kSweepCsvHeader =
    "sweep_param,value,mode,S,mean_sum_rate,stderr,mean_til_last,discarded,trials,seed";

std::string sweep_csv(const SweepResult& result);
std::string lookup_csv(const LookupTable& table);
std::string dist_csv(const std::vector<DistCheckRow>& rows);
/// CSV text for the result's kind.
std::string result_csv(const SweepResult& result);
std::string summary_json(const SweepResult& result);

/// Writes the CSV (to stdout when `spec.out` is empty) and the JSON summary.
void write_outputs(const SweepResult& result);

std::string version_string();

}  // namespace msond
