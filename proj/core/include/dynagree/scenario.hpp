#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynagree/analysis.hpp"
#include "dynagree/engine.hpp"
#include "dynagree/models.hpp"
#include "dynagree/weight_rules.hpp"

namespace dynagree {

struct InitSpec {
    enum class Kind { UniformRandom, SplitHalves, Explicit };
    Kind kind = Kind::UniformRandom;
    std::vector<double> values;  // Explicit only
};

/// A full experiment description: model, rule, precision, delay regime,
/// seed, cap, and initial values. Parsed from a JSON config file; unknown
/// keys are rejected with their field path.
struct Scenario {
    NetworkModel model;
    WeightRule rule;
    double epsilon = 1e-3;
    int delta = 1;
    DelaySchedule::Policy delay_policy = DelaySchedule::Policy::ZeroDelay;
    std::uint64_t seed = 0;
    bool has_seed = false;
    long long rounds_cap = -1;  // -1: theorem bound + 1
    InitSpec init;
    bool full_trace = false;
    bool retain_matrices = false;
};

/// Parses and validates a scenario config. ConfigError messages carry the
/// offending field path ("model.f: ...").
Scenario scenario_from_json(const std::string& text);

/// Returns the config with its top-level "seed" set (added or overwritten).
std::string with_seed(const std::string& config_json, std::uint64_t seed);

/// The scenario's initial value vector; uniform-random draws come from the
/// substream split_seed(seed, 2).
ValueVector initial_values(const Scenario& scenario);

/// The delay schedule the scenario induces (uniform-random schedules draw
/// from the substream split_seed(seed, 1)).
DelaySchedule scenario_schedule(const Scenario& scenario);

/// Runs the scenario through bound_suite; decisions are filled in when the
/// run reaches the theorem bound.
BoundSuiteResult run_scenario(const Scenario& scenario);

/// One axis of a parameter sweep: a dotted config path ("model.f",
/// "epsilon", "delta", "seed") and its values.
struct SweepAxis {
    std::string path;
    std::vector<double> values;
};

struct SweepRow {
    std::vector<std::pair<std::string, double>> params;
    ConvergenceReport report;
};

/// Cartesian sweep over the axes applied to the base config. Cells run on
/// `workers` threads; rows come back in cell order regardless. Throws
/// BudgetError when the grid exceeds `max_cells`.
std::vector<SweepRow> run_sweep(const std::string& base_json,
                                std::span<const SweepAxis> axes, int workers,
                                long long max_cells = 100'000);

}  // namespace dynagree
