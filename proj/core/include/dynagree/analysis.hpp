#pragma once

#include <optional>
#include <string>

#include "dynagree/engine.hpp"
#include "dynagree/models.hpp"
#include "dynagree/stochmat.hpp"

namespace dynagree {

/// Convergence measurement against the applicable decision-time bound.
struct ConvergenceReport {
    double epsilon = 0.0;
    std::optional<long long> observed_round;  // empty: not reached by the cap
    long long theorem_bound = -1;             // -1: no bound (unsolvable model)
    bool bound_satisfied = false;
    double delta_final = 0.0;                 // delta at the last computed round
    long long rounds_run = 0;
    bool solvable = true;
    std::string note;
};

/// First round whose delta seminorm is at or below eps; empty if never.
std::optional<long long> convergence_round(const ExecutionTrace& trace, double eps);

struct SolvabilityVerdict {
    bool coordinated = false;
    std::optional<CommGraph> witness;  // first non-rooted graph when not
};

/// Approximate consensus is solvable over a finite set of communication
/// graphs iff every one of them is rooted.
SolvabilityVerdict decide_solvability(std::span<const CommGraph> model);

struct ConsensusSetVerdict {
    bool consensus_set = false;
    std::optional<int> non_rooted_index;
    double probe_max_delta = 0.0;  // max delta over the randomized products
};

/// Matrices must carry positive diagonals. The verdict is graph-based (all
/// associated graphs rooted); the probe multiplies random length-`length`
/// backward products and reports the largest delta coefficient seen.
ConsensusSetVerdict consensus_set_check(std::span<const StochasticMatrix> matrices,
                                        std::uint64_t seed, int probes = 100,
                                        int length = 10'000);

/// Per-round contraction ceiling for the scenario's rule/model pairing:
/// f/n for equal-neighbor under sender faults, f/(n-f) for reduce,
/// f/(2(n-f)) for center. Unset when no per-round ceiling applies.
struct BoundSuiteResult {
    ConvergenceReport report;
    ExecutionTrace trace;
    double max_round_delta = 0.0;              // max delta(W(k)) observed
    std::optional<double> round_delta_bound;   // the ceiling it must respect
    bool round_delta_ok = true;
};

/// Runs the scenario's engine to min(theorem bound, cap), fills the report,
/// and checks per-round matrix contraction where a ceiling applies.
/// cap < 0 means "theorem bound + 1" (with a 10^6 safety limit).
BoundSuiteResult bound_suite(const NetworkModel& model, const WeightRule& rule,
                             const DelaySchedule& schedule, double epsilon,
                             std::span<const double> x0, long long cap = -1);

/// The slow-mixing experiment: closed-form stationary vector check, the
/// bottleneck ratio of the half split, the spectral gap, and the measured
/// time for delta(W^k) to fall below eps.
struct ButterflyReport {
    int m = 0;
    double perron_max_err = 0.0;    // numeric vs closed form, entrywise
    double phi_half_split = 0.0;    // phi of S = {1..m}
    double phi_closed_form = 0.0;   // 1/(5*2^(m-2))
    double pi_min = 0.0;
    double second_modulus = 0.0;
    double spectral_gap = 0.0;      // 1 - |lambda_2|
    long long rounds_to_eps = 0;    // min k with delta(W^k) <= eps
};
ButterflyReport butterfly_experiment(int m, double epsilon);

/// Closed-form stationary vector of the equal-neighbor butterfly matrix.
ValueVector butterfly_closed_perron(int m);

/// Rounds-to-eps for plain equal neighbor vs the macro-round procedure on
/// the same rooted pattern.
struct MacroComparison {
    long long plain_rounds = -1;        // -1: cap reached
    long long macro_steps = -1;
    long long macro_underlying_rounds = -1;
};
MacroComparison macro_vs_plain_comparison(int n, double epsilon, std::uint64_t seed,
                                          long long cap = 1'000'000);

}  // namespace dynagree
