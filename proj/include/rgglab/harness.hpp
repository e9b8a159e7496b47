#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rgglab {

enum class ExperimentKind { Gen, Spectrum, Detect, Recover, Posterior, Distance, Sweep };

std::string kind_name(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Detect;
    std::string kernel_text;
    std::vector<int> n_values;
    std::vector<int> d_values;
    int trials = 200;
    double alpha = 0.01;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int workers = 1;
    // posterior extras
    std::int64_t draws = 100000;
    int replicates = 50;
    // emit measured wall times into the seconds column (off by default so
    // that rerunning a config reproduces the CSV byte for byte)
    bool timing = false;
};

struct ConfigError {
    int line = 0;
    std::string message;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<ConfigError> errors;  // non-empty iff config is absent
};

/// Line-oriented `key = value` format with a single [kind] section header.
/// All errors are collected (not first-error-only), each with its line.
ParseResult parse_config(const std::string& text);

struct ExperimentRecord {
    std::string kind;
    std::string kernel;
    int n = 0;
    int d = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string statistic;
    double value = 0;
    std::string decision;
    double seconds = 0;

    bool operator==(const ExperimentRecord&) const = default;
};

/// Canonical CSV: fixed header, RFC-style quoting, rows sorted by
/// (kind, kernel, n, d, trial, statistic), floats at 17 significant digits.
std::string emit_records_csv(const std::vector<ExperimentRecord>& records,
                             const std::vector<std::string>& meta_comments = {});
std::vector<ExperimentRecord> parse_records_csv(const std::string& text);

/// Per-trial seed for a grid cell. Injective in practice: a 64-bit mix over
/// (master, kind, kernel hash, n, d, trial); collisions are scanned for in
/// the test suite.
std::uint64_t derive_trial_seed(std::uint64_t master, ExperimentKind kind,
                                const std::string& kernel_text, int n, int d, int trial);

struct SweepResult {
    std::vector<ExperimentRecord> records;
    int cell_failures = 0;
    std::string summary;
};

/// Executes the config grid; one record per cell-trial-statistic. Output is
/// invariant to the worker count (per-trial seeds are pre-derived and rows
/// are canonically sorted).
SweepResult run_sweep(const ExperimentConfig& config);

/// power/mse curves grouped per n: d -> per-trial values.
struct PowerCurves {
    std::map<int, std::map<int, std::vector<double>>> values;
};

PowerCurves curves_from_records(const std::vector<ExperimentRecord>& records,
                                const std::string& statistic,
                                bool value_is_rgg_decision);

struct ThresholdFit {
    bool ok = false;
    std::vector<std::pair<int, double>> crossings;  // (n, d_hat)
    std::vector<int> skipped_n;                     // no bracket at the level
    double exponent = 0;
    double intercept = 0;
    double ci_level = 0.95;
    double ci_lo = 0;
    double ci_hi = 0;
};

/// Per-n crossing of the (isotonic-smoothed) curve at `level`, interpolated
/// in log d, then a least-squares fit of log d_hat against log n with a
/// bootstrap CI over trial resampling. `decreasing` describes the curve
/// direction in d (power decreases, mse increases).
ThresholdFit fit_threshold(const PowerCurves& curves, double level, bool decreasing,
                           int bootstrap_resamples = 1000, std::uint64_t seed = 1);

/// One SVG per (kind, kernel, n) with the mean curve against d; returns the
/// written file names. Empty record sets produce an axes-only plot with a
/// "no data" annotation.
std::vector<std::string> emit_plots(const std::vector<ExperimentRecord>& records,
                                    const std::string& statistic,
                                    bool value_is_rgg_decision,
                                    const std::string& directory);

/// Runs `count` tasks with `workers` threads; task i handles index i.
/// Results must be written to pre-sized slots so the schedule cannot leak
/// into the output.
void parallel_for(int count, int workers, const std::function<void(int)>& task);

}  // namespace rgglab
