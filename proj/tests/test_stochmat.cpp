#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dynagree/analysis.hpp"
#include "dynagree/errors.hpp"
#include "dynagree/models.hpp"
#include "dynagree/rng.hpp"
#include "dynagree/stochmat.hpp"
#include "dynagree/weight_rules.hpp"
#include "test_support.hpp"

using namespace dynagree;

namespace {

StochasticMatrix random_stochastic(int n, Rng& rng) {
    std::vector<double> rows(n * n);
    for (int p = 0; p < n; ++p) {
        double sum = 0.0;
        for (int q = 0; q < n; ++q) {
            rows[p * n + q] = rng.next_unit() + 1e-3;
            sum += rows[p * n + q];
        }
        for (int q = 0; q < n; ++q) rows[p * n + q] /= sum;
    }
    return StochasticMatrix::from_rows(n, rows);
}

StochasticMatrix equal_neighbor_matrix(const CommGraph& g) {
    const int n = g.node_count();
    std::vector<double> rows(n * n, 0.0);
    ValueVector zeros(n, 0.0);
    for (Process p = 0; p < n; ++p) {
        auto up = equal_neighbor_update(n, p, g.graph().in_set(p), zeros);
        std::copy(up.weights.begin(), up.weights.end(), rows.begin() + p * n);
    }
    return StochasticMatrix::from_rows(n, rows);
}

}  // namespace

TEST_CASE("construction validates rows") {
    const double third = 1.0 / 3.0;
    std::vector<double> good{third, third, third, 1.0, 0.0, 0.0, 0.25, 0.25, 0.5};
    CHECK_NOTHROW((void)StochasticMatrix::from_rows(3, good));

    std::vector<double> negative{1.5, -0.5, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS((void)StochasticMatrix::from_rows(3, negative), ValidationError);

    std::vector<double> drifting{0.5, 0.5 + 1e-6, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS((void)StochasticMatrix::from_rows(3, drifting), ValidationError);

    // per-receiver weights of a sender-faulty round: rows stay stochastic
    Rng rng(5);
    const CommGraph g = sender_faulty_round(4, 1, rng);
    CHECK_NOTHROW((void)equal_neighbor_matrix(g));
}

TEST_CASE("associated graph reads positive entries") {
    CHECK(associated_graph(StochasticMatrix::identity(3)) == Digraph::self_loops(3));
    Rng rng(9);
    const StochasticMatrix w = random_stochastic(4, rng);
    const Digraph g = associated_graph(w);
    CHECK(g.edge_count() == 16);  // all entries positive
}

TEST_CASE("delta coefficient basics") {
    CHECK(delta_coeff(StochasticMatrix::identity(3)) == doctest::Approx(1.0));
    std::vector<double> row{0.2, 0.3, 0.5};
    CHECK(delta_coeff(StochasticMatrix::rank_one(row)) == doctest::Approx(0.0));
    // equal rows => 0 exactly
    CHECK(delta_coeff(StochasticMatrix::rank_one(row)) == 0.0);
}

TEST_CASE("sender-faulty equal-neighbor rounds contract by f/n") {
    const int n = 6;
    for (int f = 0; f <= n - 1; ++f) {
        Rng rng(100 + f);
        for (int trial = 0; trial < 50; ++trial) {
            const CommGraph g = sender_faulty_round(n, f, rng);
            const StochasticMatrix w = equal_neighbor_matrix(g);
            CHECK(delta_coeff(w) <= static_cast<double>(f) / n + 1e-12);
        }
    }
}

TEST_CASE("delta seminorm") {
    CHECK(delta_seminorm(std::vector<double>{0.4, 0.4, 0.4}) == 0.0);
    CHECK(delta_seminorm(std::vector<double>{0.0, 1.0, 0.5}) == 1.0);
}

TEST_CASE("Seneta identity and sub-multiplicativity on random instances") {
    // For n=2 the inequality is an exact equality, so the two evaluation
    // routes may differ by rounding; the slack covers a few ulps and nothing
    // more.
    constexpr double kUlpSlack = 1e-14;
    Rng rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 2 + rng.next_below(5);
        const StochasticMatrix w = random_stochastic(n, rng);
        ValueVector x(n);
        for (double& v : x) v = rng.next_unit();
        const ValueVector wx = apply_matrix(w, x);
        CHECK(delta_seminorm(wx) <= delta_coeff(w) * delta_seminorm(x) + kUlpSlack);

        const StochasticMatrix a = random_stochastic(n, rng);
        CHECK(delta_coeff(multiply(a, w)) <= delta_coeff(a) * delta_coeff(w) + kUlpSlack);
    }
}

TEST_CASE("nonsplit matrices with entries >= rho contract to 1 - rho") {
    Rng rng(19);
    for (int trial = 0; trial < 300; ++trial) {
        Rng sub(rng.next_u64());
        const CommGraph g = sample_nonsplit(5, sub);
        const StochasticMatrix w = equal_neighbor_matrix(g);
        REQUIRE(is_nonsplit(associated_graph(w)));
        double rho = 1.0;
        for (int p = 0; p < 5; ++p)
            for (int q = 0; q < 5; ++q)
                if (w(p, q) > 0.0) rho = std::min(rho, w(p, q));
        CHECK(delta_coeff(w) <= 1.0 - rho + 1e-15);
    }
}

TEST_CASE("backward product order and drift") {
    Rng rng(29);
    const StochasticMatrix single = random_stochastic(4, rng);
    CHECK(backward_product(std::vector<StochasticMatrix>{single}) == single);

    // rank-one absorption: any later factor leaves the earliest rank-one
    // factor in place
    std::vector<double> row{0.1, 0.2, 0.3, 0.4};
    const StochasticMatrix r1 = StochasticMatrix::rank_one(row);
    const StochasticMatrix r2 =
        StochasticMatrix::rank_one(std::vector<double>{0.25, 0.25, 0.25, 0.25});
    const StochasticMatrix prod = backward_product(std::vector<StochasticMatrix>{r1, r2});
    for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) CHECK(prod(p, q) == doctest::Approx(r1(p, q)));

    // sub-multiplicativity of delta along products
    std::vector<StochasticMatrix> chain;
    double bound = 1.0;
    for (int i = 0; i < 6; ++i) {
        chain.push_back(random_stochastic(4, rng));
        bound *= delta_coeff(chain.back());
    }
    CHECK(delta_coeff(backward_product(chain)) <= bound + 1e-12);
    CHECK(backward_product(chain).row_sum_drift() <= 1e-9);

    CHECK_THROWS_AS((void)backward_product(std::vector<StochasticMatrix>{}), DomainError);
}

TEST_CASE("primitivity") {
    CHECK_FALSE(is_primitive(StochasticMatrix::identity(2)));
    Rng rng(31);
    CHECK(is_primitive(random_stochastic(3, rng)));

    // 2-cycle permutation: strongly connected but periodic
    std::vector<double> perm{0.0, 1.0, 1.0, 0.0};
    CHECK_FALSE(is_primitive(StochasticMatrix::from_rows(2, perm)));

    const StochasticMatrix bf = equal_neighbor_matrix(butterfly(4));
    CHECK(is_primitive(bf));
}

TEST_CASE("perron vector: doubly stochastic, butterfly closed form, residual") {
    std::vector<double> doubly{0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5};
    const StochasticMatrix w = StochasticMatrix::from_rows(3, doubly);
    const ValueVector pi = perron_vector(w);
    for (double v : pi) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    for (int m = 3; m <= 6; ++m) {
        const StochasticMatrix bf = equal_neighbor_matrix(butterfly(m));
        const ValueVector numeric = perron_vector(bf, 1e-15, 1'000'000);
        const ValueVector closed = butterfly_closed_perron(m);
        for (int p = 0; p < 2 * m; ++p) CHECK(std::abs(numeric[p] - closed[p]) <= 1e-12);
    }

    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const StochasticMatrix r = random_stochastic(5, rng);
        const ValueVector pr = perron_vector(r, 1e-13);
        // fixed-point residual
        ValueVector lhs(5, 0.0);
        for (int p = 0; p < 5; ++p)
            for (int q = 0; q < 5; ++q) lhs[q] += r(p, q) * pr[p];
        for (int q = 0; q < 5; ++q) CHECK(std::abs(lhs[q] - pr[q]) <= 1e-13);
        double sum = 0.0;
        for (double v : pr) {
            CHECK(v > 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }

    CHECK_THROWS_AS((void)perron_vector(StochasticMatrix::identity(2)), DomainError);
}

TEST_CASE("phi and cheeger") {
    // rank-one positive matrix with uniform pi, n=2: both singletons give
    // 2 * 0.5 * 0.5
    const StochasticMatrix r1 = StochasticMatrix::rank_one(std::vector<double>{0.5, 0.5});
    ValueVector uniform2(2, 0.5);
    ProcessSet s(2);
    s.insert(0);
    CHECK(phi_subset(r1, uniform2, s) == doctest::Approx(0.5));
    const CheegerResult ch = cheeger_constant(r1, uniform2);
    CHECK(ch.value == doctest::Approx(0.5));
    CHECK(ch.minimizer.size() == 1);

    // lazy two-state chain
    std::vector<double> rows{0.75, 0.25, 0.25, 0.75};
    const StochasticMatrix w = StochasticMatrix::from_rows(2, rows);
    const ValueVector pi = perron_vector(w);
    CHECK(phi_subset(w, pi, s) == doctest::Approx(0.25));
    CHECK(cheeger_constant(w, pi).value == doctest::Approx(0.25));

    // disconnected two halves: zero cross mass
    std::vector<double> split{0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0,
                              0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.5, 0.5};
    const StochasticMatrix blockdiag = StochasticMatrix::from_rows(4, split);
    ValueVector uniform(4, 0.25);
    const CheegerResult zero = cheeger_constant(blockdiag, uniform);
    CHECK(zero.value == doctest::Approx(0.0));

    // butterfly half split matches the closed form
    for (int m = 3; m <= 6; ++m) {
        const StochasticMatrix bf = equal_neighbor_matrix(butterfly(m));
        const ValueVector closed = butterfly_closed_perron(m);
        ProcessSet half(2 * m);
        for (Process p = 0; p < m; ++p) half.insert(p);
        CHECK(std::abs(phi_subset(bf, closed, half) - 1.0 / (5.0 * std::pow(2.0, m - 2))) <=
              1e-15);
        // the exhaustive minimum cannot exceed the half-split value
        const CheegerResult full = cheeger_constant(bf, closed);
        CHECK(full.value <= phi_subset(bf, closed, half) + 1e-15);
    }

    StochasticMatrix big = StochasticMatrix::identity(30);
    ValueVector pi30(30, 1.0 / 30);
    CHECK_THROWS_AS((void)cheeger_constant(big, pi30), BudgetError);
}

TEST_CASE("second eigenvalue modulus") {
    std::vector<double> row{0.3, 0.3, 0.4};
    CHECK(second_eigenvalue_modulus(StochasticMatrix::rank_one(row)) <= 1e-12);

    std::vector<double> two{0.9, 0.1, 0.1, 0.9};
    CHECK(second_eigenvalue_modulus(StochasticMatrix::from_rows(2, two)) ==
          doctest::Approx(0.8).epsilon(1e-9));

    // butterfly: the gap shrinks by less than 0.75 per increment
    double prev_gap = 0.0;
    for (int m = 4; m <= 9; ++m) {
        const StochasticMatrix bf = equal_neighbor_matrix(butterfly(m));
        const double gap = 1.0 - second_eigenvalue_modulus(bf);
        if (m > 4) CHECK(gap / prev_gap < 0.75);
        prev_gap = gap;
    }
}

TEST_CASE("csv round trip") {
    Rng rng(43);
    const StochasticMatrix w = random_stochastic(5, rng);
    const StochasticMatrix back = matrix_from_csv(to_csv(w));
    CHECK(back == w);  // shortest round-trip decimals reproduce bits

    CHECK_THROWS_AS((void)matrix_from_csv("1,0\n0.5,0.5\nextra"), ConfigError);
    CHECK_THROWS_AS((void)matrix_from_csv("1,0\n"), ConfigError);
}
