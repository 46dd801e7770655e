#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbmtrace/fracdim/boxcount.hpp"
#include "rbmtrace/geom/domain.hpp"

namespace rbmtrace::harness {

struct DomainParams {
    std::string kind;           // empty = preset default
    double side = 1.0;          // square
    int level = 7;              // snowflake / product factor
    double height = 1.0;        // product
    int generations = 3;        // corridor
    double width_exponent = 1.5;
};

struct CantorParams {
    int pieces = 2;
    double ratio = 1.0 / 3.0;
    int depth = 10;
};

/// Everything a run needs; JSON-round-trippable. CLI flags override
/// file values which override preset defaults.
struct ExperimentConfig {
    std::string preset;
    int paths = 32;                 // M
    double T = 100.0;
    double dt = 1e-5;
    double eps_factor = 2.0;        // boundary tolerance = eps_factor * sqrt(dt)
    std::optional<double> s;        // subordinator index
    std::uint64_t master_seed = 20260401;
    std::optional<int> k_min;       // scale window overrides
    std::optional<int> k_max;
    std::string out_dir = "out";
    int threads = 0;                // 0 = hardware concurrency
    DomainParams domain;
    CantorParams cantor;
    double fine_dt = 1e-5;          // underlying walk grid, subordinated presets
    double max_fine_steps = 4e7;    // horizon cap for the underlying walk

    std::string to_json_string(int indent = -1) const;
};

ExperimentConfig config_from_json_string(const std::string& text);

/// Per-path seed: stable 64-bit hash of (master_seed, path index).
std::uint64_t path_seed(std::uint64_t master_seed, int path_index);

struct PresetInfo {
    std::string name;
    double predicted = 0.0;
    std::string citation;       // formula the prediction comes from
    double tol_above = 0.1;
    double tol_below = 0.1;
    bool exploratory = false;
};

/// The preset table with predictions evaluated at default parameters.
std::vector<PresetInfo> preset_catalog();

/// Defaults for one preset (budgets sized for the shipped targets).
ExperimentConfig default_config(const std::string& preset);

/// Prediction and tolerances resolved against a concrete config.
PresetInfo preset_info(const ExperimentConfig& config);

struct PathResult {
    int index = 0;
    std::uint64_t seed = 0;
    fracdim::DimensionEstimate estimate;
    std::size_t points = 0;      // marked cells / trace points / image points
    std::uint64_t steps = 0;     // walk steps consumed
    bool empty_set = false;      // estimate pinned to 0 (no boundary contact)
    std::string error;           // non-empty when this path failed
};

struct ExperimentReport {
    ExperimentConfig config;
    PresetInfo preset;
    std::string domain_id;
    std::vector<PathResult> paths;
    double mean = 0.0, sd = 0.0, se = 0.0;
    int n_ok = 0, n_failed = 0, n_empty = 0;
    bool pass = false;
    std::uint64_t total_steps = 0;
    double wall_seconds = 0.0;
    std::string generated_at;

    /// Volatile fields (generated_at, wall_seconds) live under the
    /// single "timestamp" key so reports diff clean across runs.
    std::string to_json_string(int indent = -1) const;
};

/// Simulates config.paths independent paths (concurrently,
/// deterministically), estimates the preset's dimension per path,
/// aggregates, and compares against the predicted value. Throws when
/// more than 10% of paths error out.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes report.json, loglog.csv, summary.csv and fit.csv under dir.
void emit_outputs(const ExperimentReport& report, const std::string& dir);

struct FixtureResult {
    std::string name;
    double target = 0.0;
    double got = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Estimator calibration gate: analytic fixtures whose fitted slopes
/// must land within 0.05 of their known dimensions.
std::vector<FixtureResult> run_calibration();

}  // namespace rbmtrace::harness
