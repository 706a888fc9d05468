#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dynagree/models.hpp"
#include "dynagree/stochmat.hpp"
#include "dynagree/weight_rules.hpp"

namespace dynagree {

/// Which round each delivered value was sent in. kappa(k,p,q) is the round
/// index of the value receiver p uses from sender q at round k; it lies in
/// {k-delta, ..., k-1}, and kappa(k,p,p) = k-1 always (a process sees its
/// own latest value). Indices below 0 refer to x(0).
///
/// Policies are pure functions of (k,p,q) so schedules never need storing;
/// Custom accepts any function, including non-monotone and duplicating ones.
struct DelaySchedule {
    enum class Policy { ZeroDelay, MaxDelay, UniformRandom, Alternating, Custom };

    int delta = 1;
    Policy policy = Policy::ZeroDelay;
    std::uint64_t seed = 0;  // UniformRandom draws from hash(seed, k, p, q)
    std::function<int(int, Process, Process)> custom;

    int kappa(int k, Process p, Process q) const;
    void validate() const;
    std::string policy_name() const;
};

struct Decision {
    int round = 0;
    double value = 0.0;
};

/// Full record of one execution: per-round value vectors, the delta
/// seminorm history, optional per-round weight matrices, and decisions.
struct ExecutionTrace {
    std::vector<ValueVector> x;               // x[k] for k = 0..rounds
    std::vector<double> delta_history;        // delta_seminorm(x[k])
    std::vector<StochasticMatrix> matrices;   // matrices[k-1] = W(k) when retained
    std::vector<std::optional<Decision>> decisions;

    int rounds() const { return static_cast<int>(x.size()) - 1; }
    int n() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
};

struct RunOptions {
    bool retain_matrices = false;
};

/// Synchronous execution: x(k) = W(k) x(k-1), receivers and senders always
/// iterated in ascending index order. x0 entries must lie in [0,1].
ExecutionTrace run_synchronous(const CommPattern& pattern, const WeightRule& rule,
                               std::span<const double> x0, int rounds,
                               RunOptions options = {});

/// Delta-bounded execution: x_p(k) = sum_q w_qp(k) x_q(kappa(k,p,q)). A ring
/// of the last delta vectors materializes the x(-j) = x(0) convention.
/// delta = 1 with the zero-delay policy reproduces run_synchronous bit for
/// bit (it is the same code path).
ExecutionTrace run_delayed(const CommPattern& pattern, const WeightRule& rule,
                           std::span<const double> x0, const DelaySchedule& schedule,
                           int rounds, RunOptions options = {});

/// The n*delta virtual matrix of one round: row p*delta+delta-1 (the
/// "current" slot of p) carries w_qp(k) at the column of sender q's slot of
/// age k - kappa(k,p,q) - 1, and every other row shifts its block's history
/// by one. Row-stochastic by construction.
StochasticMatrix build_virtual_matrix(const StochasticMatrix& round_weights,
                                      const DelaySchedule& schedule, int round);

struct VirtualRunReport {
    ExecutionTrace virtual_trace;   // dimension n*delta
    ExecutionTrace delayed_trace;   // the n-process run it must reproduce
    double max_divergence = 0.0;    // exactly 0 when the reduction is correct
};

/// Evolves the virtual state by the zero-delay recursion and checks it
/// against run_delayed at every (p,k); a mismatch is an EquivalenceError
/// naming the first differing pair.
VirtualRunReport run_virtual(const CommPattern& pattern, const WeightRule& rule,
                             std::span<const double> x0, const DelaySchedule& schedule,
                             int rounds, RunOptions options = {});

/// Macro-round execution: consumes n-1 pattern rounds per step and applies
/// the flood-then-average procedure. The trace holds values at macro
/// boundaries; underlying_rounds = steps * (n-1).
struct MacroRunResult {
    ExecutionTrace trace;
    int steps = 0;
    int underlying_rounds = 0;
};
MacroRunResult run_macro(const CommPattern& pattern, std::span<const double> x0,
                         int max_steps, double stop_epsilon = 0.0);

/// How a scenario maps onto a decision-time formula.
enum class ModelClass {
    Nonsplit,            // ceil((1/rho) ln(1/eps))
    KNonsplit,           // ceil(K (1/rho)^K ln(1/eps)) + K-1
    Coordinated,         // ceil(n (1/rho)^n ln(1/eps)) + n-1
    NonsplitDelayed,     // ceil((2D-1)(1/rho)^(2D-1) ln(1/eps)) + 2D-2
    CoordinatedDelayed,  // ceil(nD (1/rho)^(nD) ln(1/eps)) + nD-1
    Unsolvable,
};

struct BoundParams {
    ModelClass cls = ModelClass::Nonsplit;
    int n = 0;
    double rho = 0.0;
    int k_nonsplit = 0;  // KNonsplit only
    int delta = 1;       // delayed classes only
};

/// Decision round prescribed by the applicable bound. DomainError for
/// Unsolvable.
long long decision_round(const BoundParams& params, double epsilon);

/// Classifies a model under a given delay bound.
ModelClass classify(const NetworkModel& model, int delta);

/// Sets every process's decision at the prescribed round (its value there).
/// The trace must reach that round, and no process may have decided already.
long long decide(ExecutionTrace& trace, const BoundParams& params, double epsilon);

}  // namespace dynagree
