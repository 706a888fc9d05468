#pragma once

#include <cstdint>
#include <string>

#include "dynagree/digraph.hpp"
#include "dynagree/rng.hpp"

namespace dynagree {

/// How "arbitrary" fault placements are realized.
enum class FaultStrategy {
    Random,                  // uniformly random placements
    AdversarialBipartition,  // cut incoming links of nodes 1, then 2, ...
    Rotating,                // faulty sender set rotates round by round
};

/// A network model: the family of communication graphs the adversary may
/// pick from, plus the seed that fixes its choices.
struct NetworkModel {
    enum class Kind {
        Rooted,
        Nonsplit,
        CompleteLinkFaults,
        SenderFaulty,
        Butterfly,
        BidirectionalConnected,
        NonRootedWitness,
        AsyncCrashMajority,
    };

    Kind kind = Kind::Nonsplit;
    int n = 0;
    std::uint64_t seed = 0;
    double density = 0.5;  // Rooted: extra-edge probability
    int budget = 0;        // CompleteLinkFaults: links removed per round
    int f = 0;             // SenderFaulty / AsyncCrashMajority
    int m = 0;             // Butterfly (n = 2m)
    FaultStrategy strategy = FaultStrategy::Random;

    void validate() const;  // ConfigError with the offending field
    std::string kind_name() const;

    /// True when every graph the model can emit is nonsplit.
    bool nonsplit_class() const;
    /// True when every graph the model can emit is rooted.
    bool coordinated_class() const;
};

CommGraph sample_rooted(int n, Rng& rng, double density);
CommGraph sample_nonsplit(int n, Rng& rng);

/// Complete graph minus exactly `budget` off-diagonal links. The bipartition
/// strategy removes incoming links of node 1 first, then node 2, and so on;
/// at budget 2n-2 this isolates two singleton source components.
CommGraph complete_with_link_faults(int n, int budget, Rng& rng, FaultStrategy strategy);

/// Nodes 1 and 2 hear nobody else; both broadcast to {3..n}, which is
/// complete. Not rooted, with n^2-3n+2 off-diagonal links — one link short
/// of the rootedness threshold.
CommGraph non_rooted_witness(int n);

/// Complete graph after at most f senders (fresh each round) drop an
/// arbitrary subset of their outgoing links. Always nonsplit.
CommGraph sender_faulty_round(int n, int f, Rng& rng);
CommGraph rotating_sender_faulty_round(int n, int f, int round);

/// The 2m-node graph built from two mirrored broadcast-plus-chain halves
/// joined by one bidirectional link; strongly connected, and the canonical
/// slow mixer for equal-neighbor averaging.
CommGraph butterfly(int m);

CommGraph sample_bidirectional_connected(int n, Rng& rng);

/// Every process hears exactly n-f processes including itself; requires
/// n > 2f (pigeonhole then makes every pair share an in-neighbor).
CommGraph async_crash_round(int n, int f, Rng& rng);

/// Deterministic round->graph source. Round k draws from the substream
/// split_seed(model.seed, k), so rounds can be generated independently,
/// concurrently, and reproducibly.
class CommPattern {
public:
    explicit CommPattern(NetworkModel model);

    const NetworkModel& model() const { return model_; }
    int node_count() const { return model_.n; }

    /// Communication graph of round k >= 1. In debug builds the emitted
    /// graph is checked against the model's defining predicate.
    CommGraph at(int round) const;

private:
    NetworkModel model_;
};

/// The defining predicate of the model, applied to one emitted graph.
bool satisfies_model(const NetworkModel& model, const CommGraph& g);

}  // namespace dynagree
