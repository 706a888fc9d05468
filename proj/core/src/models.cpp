#include "dynagree/models.hpp"

#include <algorithm>
#include <cassert>

#include "dynagree/errors.hpp"

namespace dynagree {

void NetworkModel::validate() const {
    if (kind == Kind::Butterfly) {
        if (m < 3) throw ConfigError("model.m: butterfly requires m >= 3");
        if (n != 0 && n != 2 * m) throw ConfigError("model.n: butterfly has n = 2m");
    } else if (n < 1) {
        throw ConfigError("model.n: must be >= 1");
    }
    switch (kind) {
        case Kind::Rooted:
            if (density < 0.0 || density > 1.0)
                throw ConfigError("model.density: must be in [0,1]");
            break;
        case Kind::CompleteLinkFaults:
            if (budget < 0 || budget > n * n - n)
                throw ConfigError("model.budget: must be in [0, n^2-n]");
            break;
        case Kind::SenderFaulty:
            if (f < 0 || f > n - 1) throw ConfigError("model.f: must be in [0, n-1]");
            break;
        case Kind::AsyncCrashMajority:
            if (f < 0) throw ConfigError("model.f: must be >= 0");
            if (n <= 2 * f)
                throw ConfigError("model.f: not solvable, requires a correct majority (n > 2f)");
            break;
        case Kind::NonRootedWitness:
            if (n < 2) throw ConfigError("model.n: witness requires n >= 2");
            break;
        default:
            break;
    }
}

std::string NetworkModel::kind_name() const {
    switch (kind) {
        case Kind::Rooted: return "rooted";
        case Kind::Nonsplit: return "nonsplit";
        case Kind::CompleteLinkFaults: return "complete_link_faults";
        case Kind::SenderFaulty: return "sender_faulty";
        case Kind::Butterfly: return "butterfly";
        case Kind::BidirectionalConnected: return "bidirectional_connected";
        case Kind::NonRootedWitness: return "non_rooted_witness";
        case Kind::AsyncCrashMajority: return "async_crash_majority";
    }
    return "?";
}

bool NetworkModel::nonsplit_class() const {
    switch (kind) {
        case Kind::Nonsplit:
        case Kind::SenderFaulty:
        case Kind::AsyncCrashMajority:
            return true;
        default:
            return false;
    }
}

bool NetworkModel::coordinated_class() const {
    switch (kind) {
        case Kind::Rooted:
        case Kind::Butterfly:
        case Kind::BidirectionalConnected:
            return true;
        case Kind::CompleteLinkFaults:
            return budget <= 2 * n - 3;
        default:
            return nonsplit_class();  // nonsplit graphs are rooted
    }
}

CommGraph sample_rooted(int n, Rng& rng, double density) {
    Digraph g = Digraph::self_loops(n);
    // Random arborescence: attach each node, in random order, below an
    // already-attached one; the first node is the root.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (int i = 1; i < n; ++i) g.add_edge(order[rng.next_below(i)], order[i]);
    for (Process p = 0; p < n; ++p)
        for (Process q = 0; q < n; ++q)
            if (p != q && !g.has_edge(p, q) && rng.next_bool(density)) g.add_edge(p, q);
    return CommGraph(std::move(g));
}

CommGraph sample_nonsplit(int n, Rng& rng) {
    Digraph g = Digraph::self_loops(n);
    const Process r = rng.next_below(n);
    for (Process q = 0; q < n; ++q) g.add_edge(r, q);
    for (Process p = 0; p < n; ++p)
        for (Process q = 0; q < n; ++q)
            if (p != q && !g.has_edge(p, q) && rng.next_bool(0.5)) g.add_edge(p, q);
    return CommGraph(std::move(g));
}

CommGraph complete_with_link_faults(int n, int budget, Rng& rng, FaultStrategy strategy) {
    if (budget < 0 || budget > n * n - n)
        throw DomainError("complete_with_link_faults: budget must be in [0, n^2-n]");
    std::vector<std::pair<Process, Process>> links;
    links.reserve(n * n - n);
    if (strategy == FaultStrategy::AdversarialBipartition) {
        // Incoming links of node 0 first, then node 1, ...: after 2n-2
        // removals nodes 0 and 1 are two source components.
        for (Process p = 0; p < n; ++p)
            for (Process q = 0; q < n; ++q)
                if (q != p) links.emplace_back(q, p);
    } else {
        for (Process p = 0; p < n; ++p)
            for (Process q = 0; q < n; ++q)
                if (q != p) links.emplace_back(p, q);
        // Partial Fisher-Yates: the first `budget` entries are the faults.
        for (int i = 0; i < budget; ++i)
            std::swap(links[i], links[i + rng.next_below(static_cast<int>(links.size()) - i)]);
    }
    Digraph g = Digraph::self_loops(n);
    for (int i = budget; i < static_cast<int>(links.size()); ++i)
        g.add_edge(links[i].first, links[i].second);
    return CommGraph(std::move(g));
}

CommGraph non_rooted_witness(int n) {
    if (n < 2) throw DomainError("non_rooted_witness: requires n >= 2");
    Digraph g = Digraph::self_loops(n);
    for (Process q = 2; q < n; ++q) {
        g.add_edge(0, q);
        g.add_edge(1, q);
    }
    for (Process p = 2; p < n; ++p)
        for (Process q = 2; q < n; ++q)
            if (p != q) g.add_edge(p, q);
    return CommGraph(std::move(g));
}

CommGraph sender_faulty_round(int n, int f, Rng& rng) {
    if (f < 0 || f > n - 1) throw DomainError("sender_faulty_round: f must be in [0, n-1]");
    const int faulty_count = rng.next_below(f + 1);
    const auto faulty = rng.sample_distinct(n, faulty_count);
    Digraph out = Digraph::self_loops(n);
    std::vector<bool> is_faulty(n, false);
    for (int s : faulty) is_faulty[s] = true;
    for (Process p = 0; p < n; ++p)
        for (Process q = 0; q < n; ++q) {
            if (p == q) continue;
            if (is_faulty[p] && rng.next_bool(0.5)) continue;  // dropped
            out.add_edge(p, q);
        }
    return CommGraph(std::move(out));
}

CommGraph rotating_sender_faulty_round(int n, int f, int round) {
    Digraph out = Digraph::self_loops(n);
    std::vector<bool> is_faulty(n, false);
    for (int i = 0; i < f; ++i) is_faulty[((round - 1) * f + i) % n] = true;
    for (Process p = 0; p < n; ++p)
        for (Process q = 0; q < n; ++q)
            if (p != q && !is_faulty[p]) out.add_edge(p, q);
    return CommGraph(std::move(out));
}

CommGraph butterfly(int m) {
    if (m < 3) throw DomainError("butterfly: requires m >= 3");
    const int n = 2 * m;
    auto mirror = [m](Process p) { return 2 * m - p - 1; };  // 0-based reflection
    Digraph g = Digraph::self_loops(n);
    for (Process p = 0; p + 1 < m; ++p) {
        g.add_edge(p + 1, p);
        g.add_edge(mirror(p + 1), mirror(p));
    }
    for (Process p = 0; p < m; ++p) {
        g.add_edge(0, p);
        g.add_edge(mirror(0), mirror(p));
    }
    g.add_edge(m - 1, m);
    g.add_edge(m, m - 1);
    return CommGraph(std::move(g));
}

CommGraph sample_bidirectional_connected(int n, Rng& rng) {
    Digraph g = Digraph::self_loops(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (int i = 1; i < n; ++i) {
        const Process a = order[rng.next_below(i)];
        const Process b = order[i];
        g.add_edge(a, b);
        g.add_edge(b, a);
    }
    for (Process p = 0; p < n; ++p)
        for (Process q = p + 1; q < n; ++q)
            if (!g.has_edge(p, q) && rng.next_bool(0.25)) {
                g.add_edge(p, q);
                g.add_edge(q, p);
            }
    return CommGraph(std::move(g));
}

CommGraph async_crash_round(int n, int f, Rng& rng) {
    if (n <= 2 * f)
        throw DomainError("async_crash_round: not solvable when n <= 2f");
    Digraph g = Digraph::self_loops(n);
    for (Process p = 0; p < n; ++p) {
        // n-f-1 distinct senders besides p itself
        std::vector<int> pool;
        pool.reserve(n - 1);
        for (Process q = 0; q < n; ++q)
            if (q != p) pool.push_back(q);
        for (int i = 0; i < n - f - 1; ++i) {
            std::swap(pool[i], pool[i + rng.next_below(static_cast<int>(pool.size()) - i)]);
            g.add_edge(pool[i], p);
        }
    }
    return CommGraph(std::move(g));
}

CommPattern::CommPattern(NetworkModel model) : model_(std::move(model)) {
    model_.validate();
    if (model_.kind == NetworkModel::Kind::Butterfly && model_.n == 0) model_.n = 2 * model_.m;
}

CommGraph CommPattern::at(int round) const {
    if (round < 1) throw DomainError("CommPattern::at: rounds start at 1");
    Rng rng(split_seed(model_.seed, static_cast<std::uint64_t>(round)));
    CommGraph g = [&]() -> CommGraph {
        switch (model_.kind) {
            case NetworkModel::Kind::Rooted:
                return sample_rooted(model_.n, rng, model_.density);
            case NetworkModel::Kind::Nonsplit:
                return sample_nonsplit(model_.n, rng);
            case NetworkModel::Kind::CompleteLinkFaults:
                return complete_with_link_faults(model_.n, model_.budget, rng, model_.strategy);
            case NetworkModel::Kind::SenderFaulty:
                if (model_.strategy == FaultStrategy::Rotating)
                    return rotating_sender_faulty_round(model_.n, model_.f, round);
                return sender_faulty_round(model_.n, model_.f, rng);
            case NetworkModel::Kind::Butterfly:
                return butterfly(model_.m);
            case NetworkModel::Kind::BidirectionalConnected:
                return sample_bidirectional_connected(model_.n, rng);
            case NetworkModel::Kind::NonRootedWitness:
                return non_rooted_witness(model_.n);
            case NetworkModel::Kind::AsyncCrashMajority:
                return async_crash_round(model_.n, model_.f, rng);
        }
        throw ConfigError("unknown model kind");
    }();
    assert(satisfies_model(model_, g));
    return g;
}

bool satisfies_model(const NetworkModel& model, const CommGraph& g) {
    switch (model.kind) {
        case NetworkModel::Kind::Rooted:
            return is_rooted(g);
        case NetworkModel::Kind::Nonsplit:
        case NetworkModel::Kind::SenderFaulty:
            return is_nonsplit(g);
        case NetworkModel::Kind::CompleteLinkFaults:
            return offdiag_link_count(g) == g.node_count() * g.node_count() -
                                                g.node_count() - model.budget;
        case NetworkModel::Kind::Butterfly:
            return is_strongly_connected(g);
        case NetworkModel::Kind::BidirectionalConnected: {
            for (Process p = 0; p < g.node_count(); ++p)
                for (Process q = 0; q < g.node_count(); ++q)
                    if (g.graph().has_edge(p, q) != g.graph().has_edge(q, p)) return false;
            return is_strongly_connected(g);  // symmetric + strongly connected = connected
        }
        case NetworkModel::Kind::NonRootedWitness:
            return !is_rooted(g);
        case NetworkModel::Kind::AsyncCrashMajority: {
            for (Process p = 0; p < g.node_count(); ++p)
                if (g.graph().in_set(p).size() != g.node_count() - model.f) return false;
            return is_nonsplit(g);
        }
    }
    return false;
}

}  // namespace dynagree
