#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynagree/process_set.hpp"

namespace dynagree {

/// Directed graph on processes [0, n). Self-loops are allowed but not
/// required; this is the "generalized" graph type that also represents
/// graphs associated to virtual matrices, where most nodes have none.
class Digraph {
public:
    Digraph() = default;
    explicit Digraph(int n);

    /// Graph with exactly the n self-loops and nothing else.
    static Digraph self_loops(int n);

    int node_count() const { return n_; }
    int edge_count() const { return edges_; }

    void add_edge(Process from, Process to);
    bool has_edge(Process from, Process to) const;

    const ProcessSet& in_set(Process p) const;
    const ProcessSet& out_set(Process p) const;

    bool has_all_self_loops() const;

    /// Edges sorted by (from, to); the canonical order for exports.
    std::vector<std::pair<Process, Process>> edges() const;

    friend bool operator==(const Digraph&, const Digraph&) = default;

private:
    int n_ = 0;
    int edges_ = 0;
    std::vector<ProcessSet> in_;
    std::vector<ProcessSet> out_;
};

/// Communication graph: a Digraph with a self-loop at every node, the shape
/// every round's delivery graph must have.
class CommGraph {
public:
    /// Validates the self-loop invariant; throws ValidationError otherwise.
    explicit CommGraph(Digraph g);

    static CommGraph complete(int n);
    static CommGraph self_loops_only(int n);

    int node_count() const { return g_.node_count(); }
    int edge_count() const { return g_.edge_count(); }
    const Digraph& graph() const { return g_; }
    operator const Digraph&() const { return g_; }

    friend bool operator==(const CommGraph&, const CommGraph&) = default;

private:
    Digraph g_;
};

/// Incoming neighbors of p; for a CommGraph this always contains p itself.
ProcessSet in_neighbors(const Digraph& g, Process p);

/// Graph product: edge (p,q) iff some r has (p,r) in g and (r,q) in h.
/// Order matters; the product is written g∘h.
Digraph product(const Digraph& g, const Digraph& h);
CommGraph product(const CommGraph& g, const CommGraph& h);

/// Condensation: the DAG of strongly connected components. Component ids are
/// assigned in discovery order of each component's first-visited node, so
/// identical graphs always condense identically.
struct Condensation {
    std::vector<int> scc_of;                         // node -> component id
    int component_count = 0;
    std::vector<std::pair<int, int>> dag_edges;      // deduplicated, sorted
};
Condensation condensation(const Digraph& g);

/// All processes from which every node is reachable; empty iff not rooted.
ProcessSet roots(const Digraph& g);

/// True iff the condensation has exactly one component without incoming
/// dag edges. Agrees with !roots(g).empty().
bool is_rooted(const Digraph& g);

bool is_strongly_connected(const Digraph& g);

/// True iff every pair of nodes has a common incoming neighbor.
bool is_nonsplit(const Digraph& g);

/// True iff every ordered product of k graphs from the set (repetition
/// allowed) is nonsplit. Exhaustive; throws BudgetError once more than
/// `budget` graph products would be required.
bool is_k_nonsplit(std::span<const CommGraph> graphs, int k,
                   long long budget = 1'000'000);

/// Number of links that are not self-loops. Fault budgets count these; the
/// total including the n self-loops is edge_count().
int offdiag_link_count(const CommGraph& g);

/// DOT rendering with nodes ordered and labeled 1..n; self-loops included.
std::string to_dot(const Digraph& g);

}  // namespace dynagree
