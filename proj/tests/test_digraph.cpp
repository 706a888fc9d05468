#include <doctest.h>

#include <algorithm>

#include "dynagree/digraph.hpp"
#include "dynagree/errors.hpp"
#include "dynagree/models.hpp"
#include "dynagree/rng.hpp"
#include "test_support.hpp"

using namespace dynagree;
using test::digraph_from_mask;
using test::oracle_reaches_all;
using test::random_comm_graph;

namespace {

CommGraph star_graph(int n) {
    // node 0 broadcasts to everyone; self-loops everywhere
    Digraph g = Digraph::self_loops(n);
    for (Process q = 1; q < n; ++q) g.add_edge(0, q);
    return CommGraph(std::move(g));
}

CommGraph chain_graph(int n) {
    Digraph g = Digraph::self_loops(n);
    for (Process p = 0; p + 1 < n; ++p) g.add_edge(p, p + 1);
    return CommGraph(std::move(g));
}

}  // namespace

TEST_CASE("in_neighbors on standard graphs") {
    const CommGraph star = star_graph(5);
    CHECK(in_neighbors(star, 2).to_vector() == std::vector<Process>{0, 2});

    const CommGraph complete = CommGraph::complete(4);
    CHECK(in_neighbors(complete, 1).to_vector() == std::vector<Process>{0, 1, 2, 3});

    // Butterfly m=3, node m (0-based 2): hears the broadcaster, itself, and
    // its mirror across the bridge.
    const CommGraph bf = butterfly(3);
    CHECK(in_neighbors(bf, 2).to_vector() == std::vector<Process>{0, 2, 3});

    CHECK_THROWS_AS((void)in_neighbors(star, 7), DomainError);
    CHECK_THROWS_AS((void)in_neighbors(star, -1), DomainError);
}

TEST_CASE("CommGraph requires self-loops") {
    Digraph g(3);
    g.add_edge(0, 1);
    CHECK_THROWS_AS(CommGraph{std::move(g)}, ValidationError);
    CHECK(CommGraph::self_loops_only(3).edge_count() == 3);
}

TEST_CASE("product identity and path composition") {
    Rng rng(7);
    const CommGraph g = random_comm_graph(5, rng);
    const CommGraph id = CommGraph::self_loops_only(5);
    CHECK(product(g, id) == g);
    CHECK(product(id, g) == g);

    Digraph a = Digraph::self_loops(3);
    a.add_edge(0, 1);
    Digraph b = Digraph::self_loops(3);
    b.add_edge(1, 2);
    const Digraph ab = product(a, b);
    CHECK(ab.has_edge(0, 2));  // 0 -> 1 in a, 1 -> 2 in b
    CHECK(ab.has_edge(0, 1));
    CHECK(ab.has_edge(1, 2));

    Digraph wrong(4);
    CHECK_THROWS_AS((void)product(a, wrong), DomainError);
}

TEST_CASE("self-loop closure: product of comm graphs keeps both edge sets") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const CommGraph g = random_comm_graph(6, rng);
        const CommGraph h = random_comm_graph(6, rng);
        const CommGraph gh = product(g, h);
        for (auto [p, q] : g.graph().edges()) CHECK(gh.graph().has_edge(p, q));
        for (auto [p, q] : h.graph().edges()) CHECK(gh.graph().has_edge(p, q));
    }
}

TEST_CASE("condensation shapes") {
    CHECK(condensation(CommGraph::complete(4).graph()).component_count == 1);
    CHECK(condensation(CommGraph::complete(4).graph()).dag_edges.empty());

    // two disjoint 2-cliques
    Digraph cliques = Digraph::self_loops(4);
    cliques.add_edge(0, 1);
    cliques.add_edge(1, 0);
    cliques.add_edge(2, 3);
    cliques.add_edge(3, 2);
    const Condensation cc = condensation(cliques);
    CHECK(cc.component_count == 2);
    CHECK(cc.dag_edges.empty());

    const Condensation chain = condensation(chain_graph(3).graph());
    CHECK(chain.component_count == 3);
    CHECK(chain.dag_edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    // ids in discovery order: node 0 first
    CHECK(chain.scc_of == std::vector<int>{0, 1, 2});
}

TEST_CASE("roots on standard graphs") {
    CHECK(roots(star_graph(4)).to_vector() == std::vector<Process>{0});
    CHECK(roots(CommGraph::complete(4)).to_vector() == std::vector<Process>{0, 1, 2, 3});
    CHECK(roots(non_rooted_witness(4)).empty());
}

TEST_CASE("roots and is_rooted match the reachability oracle exhaustively") {
    for (int n = 3; n <= 4; ++n) {
        const int slots = n * n - n;
        for (unsigned mask = 0; mask < (1u << slots); ++mask) {
            const Digraph g = digraph_from_mask(n, mask);
            const auto oracle = oracle_reaches_all(g);
            const ProcessSet r = roots(g);
            bool any = false;
            for (Process p = 0; p < n; ++p) {
                CHECK(r.contains(p) == oracle[p]);
                any = any || oracle[p];
            }
            CHECK(is_rooted(g) == any);
        }
    }
}

TEST_CASE("no incoming links into S traps every root") {
    Rng rng(23);
    for (int n = 3; n <= 5; ++n) {
        for (int trial = 0; trial < 40; ++trial) {
            const CommGraph g = random_comm_graph(n, rng, 0.3);
            const ProcessSet r = roots(g);
            for (unsigned mask = 1; mask < (1u << n); ++mask) {
                ProcessSet s(n);
                for (Process p = 0; p < n; ++p)
                    if (mask >> p & 1) s.insert(p);
                ProcessSet in_s(n);
                s.for_each([&](Process p) { in_s |= g.graph().in_set(p); });
                if (in_s.is_subset_of(s)) CHECK(r.is_subset_of(s));
            }
        }
    }
}

TEST_CASE("nonsplit checks") {
    CHECK(is_nonsplit(CommGraph::complete(5)));
    CHECK(is_nonsplit(star_graph(6)));  // everyone hears the broadcaster
    CHECK_FALSE(is_nonsplit(chain_graph(3)));
    CHECK_FALSE(is_nonsplit(CommGraph::self_loops_only(2)));
}

TEST_CASE("every nonsplit comm graph is rooted") {
    Rng rng(31);
    const int n = 4;
    const int slots = n * n - n;
    for (unsigned mask = 0; mask < (1u << slots); ++mask) {
        const Digraph g = digraph_from_mask(n, mask);
        if (is_nonsplit(g)) CHECK(is_rooted(g));
    }
    for (int trial = 0; trial < 200; ++trial) {
        Rng r2(rng.next_u64());
        const CommGraph g = sample_nonsplit(6, r2);
        CHECK(is_rooted(g));
    }
}

TEST_CASE("products of n-1 rooted graphs are nonsplit") {
    Rng rng(41);
    for (int n = 3; n <= 6; ++n) {
        for (int trial = 0; trial < 60; ++trial) {
            Digraph acc = Digraph::self_loops(n);
            CommGraph first = sample_rooted(n, rng, 0.2);
            acc = first.graph();
            for (int i = 1; i < n - 1; ++i) acc = product(acc, sample_rooted(n, rng, 0.2).graph());
            CHECK(is_nonsplit(acc));
        }
    }
}

TEST_CASE("k-nonsplit enumeration") {
    std::vector<CommGraph> nonsplits;
    Rng rng(53);
    for (int i = 0; i < 4; ++i) nonsplits.push_back(sample_nonsplit(4, rng));
    CHECK(is_k_nonsplit(nonsplits, 1));

    std::vector<CommGraph> chain{chain_graph(3)};
    CHECK_FALSE(is_k_nonsplit(chain, 1));

    // every rooted self-looped digraph on 3 nodes; any ordered pair of them
    // multiplies to a nonsplit graph
    std::vector<CommGraph> rooted3;
    for (unsigned mask = 0; mask < (1u << 6); ++mask) {
        Digraph g = digraph_from_mask(3, mask);
        if (is_rooted(g)) rooted3.emplace_back(std::move(g));
    }
    CHECK(rooted3.size() == 51);
    CHECK(is_k_nonsplit(rooted3, 2));

    CHECK_THROWS_AS((void)is_k_nonsplit(rooted3, 2, 100), BudgetError);
    CHECK_THROWS_AS((void)is_k_nonsplit(rooted3, 0), DomainError);
}

TEST_CASE("off-diagonal link counts") {
    CHECK(offdiag_link_count(CommGraph::complete(4)) == 12);
    Rng rng(3);
    const CommGraph faulted = complete_with_link_faults(4, 5, rng, FaultStrategy::Random);
    CHECK(offdiag_link_count(faulted) == 7);  // n^2-3n+3 at n=4
    CHECK(offdiag_link_count(non_rooted_witness(4)) == 6);  // n^2-3n+2 at n=4
}

TEST_CASE("rootedness threshold on off-diagonal links, exhaustive n=4") {
    const int n = 4;
    const int slots = n * n - n;
    for (unsigned mask = 0; mask < (1u << slots); ++mask) {
        const Digraph g = digraph_from_mask(n, mask);
        if (g.edge_count() - n >= 7) CHECK(is_rooted(g));
    }
    CHECK_FALSE(is_rooted(non_rooted_witness(4)));
}

TEST_CASE("dot export is deterministic and 1-based") {
    Digraph g = Digraph::self_loops(2);
    g.add_edge(0, 1);
    CHECK(to_dot(g) ==
          "digraph G {\n  1;\n  2;\n  1 -> 1;\n  1 -> 2;\n  2 -> 2;\n}\n");
}
