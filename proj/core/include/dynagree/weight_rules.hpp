#pragma once

#include <span>
#include <string>
#include <vector>

#include "dynagree/digraph.hpp"
#include "dynagree/process_set.hpp"

namespace dynagree {

/// One receiver's update for a round: the new value and the weight given to
/// every sender (0 for senders that did not contribute). The value is always
/// produced by row_apply over the weights, so rule evaluation and matrix
/// application are bit-identical.
struct ReceiverUpdate {
    double value = 0.0;
    std::vector<double> weights;
};

/// Pluggable per-round weight assignment. Every rule emits weights that are
/// nonnegative, sum to 1, vanish exactly on non-contributors, and are at
/// least rho() when positive.
struct WeightRule {
    enum class Kind { EqualNeighbor, FixedWeight, Reduce, Center, MacroRound };

    Kind kind = Kind::EqualNeighbor;
    std::vector<double> alpha;  // FixedWeight; empty means alpha_p = n for all p
    int f = 0;                  // Reduce / Center fault budget

    static WeightRule equal_neighbor();
    static WeightRule fixed_weight(std::vector<double> alpha = {});
    static WeightRule reduce(int f);
    static WeightRule center(int f);
    static WeightRule macro_round();

    /// Guaranteed lower bound on positive weights for an n-process system.
    double rho(int n) const;

    /// Parameter ranges for an n-process system; ConfigError on violation.
    void validate(int n) const;

    std::string name() const;
};

/// Uniform weights 1/|In_p| over the in-neighbors.
ReceiverUpdate equal_neighbor_update(int n, Process receiver, const ProcessSet& in,
                                     std::span<const double> gathered);

/// Weight 1/alpha_q on each other in-neighbor q and the remainder on self.
/// The self weight must stay positive; a violation raises ConfigError naming
/// the round.
ReceiverUpdate fixed_weight_update(int n, Process receiver, const ProcessSet& in,
                                   std::span<const double> gathered,
                                   std::span<const double> alpha, int round);

/// Missing senders are filled with the sentinel -1, the f smallest of the n
/// values are removed, and the remaining n-f are averaged with weight
/// 1/(n-f) each. Requires n > 2f and at most f missing senders.
ReceiverUpdate reduce_update(int n, int f, Process receiver, const ProcessSet& in,
                             std::span<const double> gathered, int round);

/// With t missing senders (t <= f): if f-t is even, drop the (f-t)/2
/// smallest and greatest received values and weight the remaining n-f by
/// 1/(n-f); if f-t is odd, drop (f-t-1)/2 from each end and weight the
/// remaining n-f+1 by 1/(n-f), except the two extremes at 1/(2(n-f)).
ReceiverUpdate center_update(int n, int f, Process receiver, const ProcessSet& in,
                             std::span<const double> gathered, int round);

/// Dispatch on rule.kind. `gathered[q]` is the value delivered by sender q
/// this round; only entries with q in `in` are read. MacroRound is not a
/// per-receiver rule and is rejected here.
ReceiverUpdate rule_update(const WeightRule& rule, int n, int round, Process receiver,
                           const ProcessSet& in, std::span<const double> gathered);

/// One macro step: processes flood (id, start value) pairs along the block's
/// graphs in time order, then each applies equal-neighbor averaging over the
/// distinct start values heard. Equal to equal-neighbor on the block's
/// product graph. Block length must be n-1.
std::vector<double> macro_round_equal_neighbor(std::span<const CommGraph> block,
                                               std::span<const double> start);

/// Heard-of sets of a block: entry p is the set of processes whose start
/// value reaches p along the block in time order. Coincides with the
/// in-neighborhoods of block[0] ∘ block[1] ∘ ... ∘ block[B-1].
std::vector<ProcessSet> flood_block(std::span<const CommGraph> block);

}  // namespace dynagree
