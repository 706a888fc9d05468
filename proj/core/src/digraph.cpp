#include "dynagree/digraph.hpp"

#include <algorithm>
#include <sstream>

#include "dynagree/errors.hpp"

namespace dynagree {

Digraph::Digraph(int n) : n_(n) {
    if (n < 1) throw DomainError("Digraph: node count must be >= 1");
    in_.assign(n, ProcessSet(n));
    out_.assign(n, ProcessSet(n));
}

Digraph Digraph::self_loops(int n) {
    Digraph g(n);
    for (Process p = 0; p < n; ++p) g.add_edge(p, p);
    return g;
}

void Digraph::add_edge(Process from, Process to) {
    if (from < 0 || from >= n_ || to < 0 || to >= n_)
        throw DomainError("Digraph::add_edge: endpoint out of range");
    if (!out_[from].contains(to)) {
        out_[from].insert(to);
        in_[to].insert(from);
        ++edges_;
    }
}

bool Digraph::has_edge(Process from, Process to) const {
    if (from < 0 || from >= n_ || to < 0 || to >= n_)
        throw DomainError("Digraph::has_edge: endpoint out of range");
    return out_[from].contains(to);
}

const ProcessSet& Digraph::in_set(Process p) const {
    if (p < 0 || p >= n_) throw DomainError("Digraph::in_set: process out of range");
    return in_[p];
}

const ProcessSet& Digraph::out_set(Process p) const {
    if (p < 0 || p >= n_) throw DomainError("Digraph::out_set: process out of range");
    return out_[p];
}

bool Digraph::has_all_self_loops() const {
    for (Process p = 0; p < n_; ++p)
        if (!out_[p].contains(p)) return false;
    return true;
}

std::vector<std::pair<Process, Process>> Digraph::edges() const {
    std::vector<std::pair<Process, Process>> out;
    out.reserve(edges_);
    for (Process p = 0; p < n_; ++p)
        out_[p].for_each([&](Process q) { out.emplace_back(p, q); });
    return out;
}

CommGraph::CommGraph(Digraph g) : g_(std::move(g)) {
    if (!g_.has_all_self_loops())
        throw ValidationError("CommGraph: a self-loop is required at every node");
}

CommGraph CommGraph::complete(int n) {
    Digraph g(n);
    for (Process p = 0; p < n; ++p)
        for (Process q = 0; q < n; ++q) g.add_edge(p, q);
    return CommGraph(std::move(g));
}

CommGraph CommGraph::self_loops_only(int n) { return CommGraph(Digraph::self_loops(n)); }

ProcessSet in_neighbors(const Digraph& g, Process p) { return g.in_set(p); }

Digraph product(const Digraph& g, const Digraph& h) {
    if (g.node_count() != h.node_count())
        throw DomainError("product: graphs must have the same node count");
    const int n = g.node_count();
    Digraph out(n);
    // out-row of p in g∘h is the union of h's out-rows over g's out-row of p
    for (Process p = 0; p < n; ++p) {
        ProcessSet row(n);
        g.out_set(p).for_each([&](Process r) { row |= h.out_set(r); });
        row.for_each([&](Process q) { out.add_edge(p, q); });
    }
    return out;
}

CommGraph product(const CommGraph& g, const CommGraph& h) {
    return CommGraph(product(g.graph(), h.graph()));
}

namespace {

// Iterative Tarjan. Components come out in completion order; the caller
// renumbers them by first-discovery so ids are reproducible.
struct Tarjan {
    const Digraph& g;
    std::vector<int> index, lowlink, comp;
    std::vector<bool> on_stack;
    std::vector<Process> stack;
    int next_index = 0;
    int comp_count = 0;

    explicit Tarjan(const Digraph& graph)
        : g(graph),
          index(graph.node_count(), -1),
          lowlink(graph.node_count(), 0),
          comp(graph.node_count(), -1),
          on_stack(graph.node_count(), false) {}

    void run(Process start) {
        struct Frame {
            Process v;
            std::vector<Process> succ;
            std::size_t next = 0;
        };
        std::vector<Frame> frames;
        frames.push_back({start, g.out_set(start).to_vector()});
        index[start] = lowlink[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = true;

        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next < f.succ.size()) {
                Process w = f.succ[f.next++];
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, g.out_set(w).to_vector()});
                } else if (on_stack[w]) {
                    lowlink[f.v] = std::min(lowlink[f.v], index[w]);
                }
            } else {
                if (lowlink[f.v] == index[f.v]) {
                    while (true) {
                        Process w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if (w == f.v) break;
                    }
                    ++comp_count;
                }
                Process child = f.v;
                frames.pop_back();
                if (!frames.empty()) {
                    Process parent = frames.back().v;
                    lowlink[parent] = std::min(lowlink[parent], lowlink[child]);
                }
            }
        }
    }
};

}  // namespace

Condensation condensation(const Digraph& g) {
    const int n = g.node_count();
    Tarjan t(g);
    for (Process p = 0; p < n; ++p)
        if (t.index[p] == -1) t.run(p);

    std::vector<int> first_disc(t.comp_count, -1);
    for (Process p = 0; p < n; ++p) {
        int& slot = first_disc[t.comp[p]];
        if (slot == -1 || t.index[p] < slot) slot = t.index[p];
    }
    std::vector<int> order(t.comp_count);
    for (int c = 0; c < t.comp_count; ++c) order[c] = c;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return first_disc[a] < first_disc[b]; });
    std::vector<int> renum(t.comp_count);
    for (int i = 0; i < t.comp_count; ++i) renum[order[i]] = i;

    Condensation out;
    out.component_count = t.comp_count;
    out.scc_of.resize(n);
    for (Process p = 0; p < n; ++p) out.scc_of[p] = renum[t.comp[p]];

    std::vector<std::pair<int, int>> dag;
    for (auto [p, q] : g.edges()) {
        const int a = out.scc_of[p];
        const int b = out.scc_of[q];
        if (a != b) dag.emplace_back(a, b);
    }
    std::sort(dag.begin(), dag.end());
    dag.erase(std::unique(dag.begin(), dag.end()), dag.end());
    out.dag_edges = std::move(dag);
    return out;
}

namespace {

int source_component_count(const Condensation& c, int* source_out) {
    std::vector<bool> has_incoming(c.component_count, false);
    for (auto [a, b] : c.dag_edges) has_incoming[b] = true;
    int sources = 0;
    for (int i = 0; i < c.component_count; ++i) {
        if (!has_incoming[i]) {
            if (source_out) *source_out = i;
            ++sources;
        }
    }
    return sources;
}

}  // namespace

ProcessSet roots(const Digraph& g) {
    const int n = g.node_count();
    const Condensation c = condensation(g);
    int source = -1;
    ProcessSet out(n);
    // A unique source component reaches every component of the DAG, and all
    // of its members are roots; with two or more sources nothing reaches all.
    if (source_component_count(c, &source) != 1) return out;
    for (Process p = 0; p < n; ++p)
        if (c.scc_of[p] == source) out.insert(p);
    return out;
}

bool is_rooted(const Digraph& g) {
    return source_component_count(condensation(g), nullptr) == 1;
}

bool is_strongly_connected(const Digraph& g) {
    return condensation(g).component_count == 1;
}

bool is_nonsplit(const Digraph& g) {
    const int n = g.node_count();
    for (Process p = 0; p < n; ++p)
        for (Process q = p + 1; q < n; ++q)
            if (!g.in_set(p).intersects(g.in_set(q))) return false;
    return true;
}

bool is_k_nonsplit(std::span<const CommGraph> graphs, int k, long long budget) {
    if (k < 1) throw DomainError("is_k_nonsplit: k must be >= 1");
    if (graphs.empty()) throw DomainError("is_k_nonsplit: empty model");
    const int n = graphs.front().node_count();
    for (const auto& g : graphs)
        if (g.node_count() != n)
            throw DomainError("is_k_nonsplit: graphs must share a node count");

    long long products = 0;
    // DFS over ordered length-k sequences with prefix products, so each
    // extension costs exactly one graph multiply.
    std::vector<Digraph> prefix(k);
    std::vector<std::size_t> choice(k, 0);
    int depth = 0;
    while (true) {
        if (choice[depth] == graphs.size()) {
            if (depth == 0) return true;
            choice[depth] = 0;
            --depth;
            ++choice[depth];
            continue;
        }
        const Digraph& next = graphs[choice[depth]].graph();
        if (depth == 0) {
            prefix[0] = next;
        } else {
            if (++products > budget)
                throw BudgetError("is_k_nonsplit: product budget exceeded");
            prefix[depth] = product(prefix[depth - 1], next);
        }
        if (depth == k - 1) {
            if (!is_nonsplit(prefix[depth])) return false;
            ++choice[depth];
        } else {
            ++depth;
        }
    }
}

int offdiag_link_count(const CommGraph& g) { return g.edge_count() - g.node_count(); }

std::string to_dot(const Digraph& g) {
    std::ostringstream os;
    os << "digraph G {\n";
    for (Process p = 0; p < g.node_count(); ++p) os << "  " << p + 1 << ";\n";
    for (auto [p, q] : g.edges()) os << "  " << p + 1 << " -> " << q + 1 << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace dynagree
