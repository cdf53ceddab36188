#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polylab/env.hpp"
#include "polylab/scaling.hpp"

namespace polylab::experiments {

// One Monte Carlo study: a named protocol from `catalog()` plus the knobs it
// exposes. Every replicate seed is derived from `seed` alone, so a config
// determines its report bit for bit (wall time aside). `tolerances` carries
// exactly the thresholds the verdicts reference, keyed by verdict name.
struct ExperimentConfig {
    std::string name;
    ScalingRegime regime{0.5, 1.0, 1.0};
    std::vector<std::int64_t> n_values;
    int reps = 0;
    env::DistSpec dist;
    std::uint64_t seed = 0;
    std::map<std::string, double> tolerances;
    double budget_seconds = 900.0;
};

struct SeriesStats {
    std::string name;
    std::vector<double> replicates; // slot r = replicate r, order fixed by seed
    double mean = 0.0;
    double sd = 0.0;
    double q10 = 0.0, q50 = 0.0, q90 = 0.0;
};

struct PerN {
    std::int64_t n = 0;
    std::vector<std::uint64_t> seeds; // per-replicate seeds of the first series
    std::vector<SeriesStats> series;
};

// Full result of a run. `derived` and `targets` are ordered key/value lists
// (insertion order is part of the serialized format); every verdict key names
// a tolerance present in the config. `wall_seconds` is run diagnostics and is
// deliberately left out of the serialized document, so two runs of one config
// produce byte-identical files.
struct McReport {
    ExperimentConfig config;
    std::string anchor;
    std::vector<PerN> per_n;
    std::vector<std::pair<std::string, double>> derived;
    std::vector<std::pair<std::string, double>> targets;
    std::vector<std::pair<std::string, bool>> verdicts;
    bool pass = false;
    double wall_seconds = 0.0;
};

struct CatalogEntry {
    std::string name;
    std::string anchor;  // one-line statement of the limit or law being probed
    std::string summary; // what is sampled, what is fixed, how the verdicts read
    ExperimentConfig defaults;
};

// The fifteen built-in studies, in a fixed order.
const std::vector<CatalogEntry>& catalog();

// Defaults for one study; unknown names raise unsupported_error listing the
// valid ones.
ExperimentConfig default_config(const std::string& name);

// Cheap closed-form projections used as the admission guard: run_experiment
// refuses (refusal_error) when the projected time exceeds budget_seconds or
// the projected allocation exceeds an internal cap, quoting both numbers.
double projected_seconds(const ExperimentConfig& config);
double projected_bytes(const ExperimentConfig& config);

McReport run_experiment(const ExperimentConfig& config);

// Least squares of ys on xs with the residual-based standard error of the
// slope; refuses degenerate input (fewer than two points or constant xs).
struct RegressionLine {
    double slope = 0.0;
    double intercept = 0.0;
    double std_error = 0.0;
};
RegressionLine two_sample_regression(std::span<const double> xs, std::span<const double> ys);

// Stable-key-order JSON, lossless for doubles; `report_from_json` inverts it.
// The layout is pinned by schemas/mcreport.schema.json.
std::string to_json(const McReport& report);
McReport report_from_json(const std::string& text);

// Long format: header `experiment,n,rep,seed,value`, one row per replicate of
// the leading series of each size.
std::string to_csv(const McReport& report);

} // namespace polylab::experiments
