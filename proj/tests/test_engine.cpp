#include <doctest.h>

#include <cmath>

#include "dynagree/analysis.hpp"
#include "dynagree/engine.hpp"
#include "dynagree/errors.hpp"
#include "dynagree/io.hpp"
#include "dynagree/models.hpp"
#include "dynagree/rng.hpp"
#include "test_support.hpp"

using namespace dynagree;

namespace {

NetworkModel make_model(NetworkModel::Kind kind, int n, std::uint64_t seed) {
    NetworkModel m;
    m.kind = kind;
    m.n = n;
    m.seed = seed;
    return m;
}

NetworkModel complete_model(int n, std::uint64_t seed) {
    NetworkModel m = make_model(NetworkModel::Kind::SenderFaulty, n, seed);
    m.f = 0;  // no faults: the constant complete graph
    return m;
}

}  // namespace

TEST_CASE("one complete round flattens everything") {
    const CommPattern pattern{complete_model(4, 1)};
    const ValueVector x0{0.1, 0.9, 0.4, 0.6};
    const ExecutionTrace trace =
        run_synchronous(pattern, WeightRule::equal_neighbor(), x0, 3);
    CHECK(trace.delta_history[1] == 0.0);  // identical sums, bit for bit
    CHECK(trace.x[1][0] == doctest::Approx(0.5));
}

TEST_CASE("self-loops-only pattern freezes the state") {
    const CommPattern pattern{make_model(NetworkModel::Kind::NonRootedWitness, 2, 1)};
    const ValueVector x0{0.0, 1.0};
    const ExecutionTrace trace =
        run_synchronous(pattern, WeightRule::equal_neighbor(), x0, 10);
    for (int k = 0; k <= 10; ++k) {
        CHECK(trace.x[k][0] == 0.0);
        CHECK(trace.x[k][1] == 1.0);
        CHECK(trace.delta_history[k] == 1.0);
    }
}

TEST_CASE("trace values match the backward matrix product") {
    const CommPattern pattern{make_model(NetworkModel::Kind::Rooted, 5, 77)};
    Rng rng(5);
    ValueVector x0(5);
    for (double& v : x0) v = rng.next_unit();
    const ExecutionTrace trace = run_synchronous(pattern, WeightRule::equal_neighbor(), x0,
                                                 20, {.retain_matrices = true});
    REQUIRE(trace.matrices.size() == 20);
    const StochasticMatrix cumulative = backward_product(trace.matrices);
    const ValueVector direct = apply_matrix(cumulative, x0);
    for (int p = 0; p < 5; ++p) CHECK(std::abs(direct[p] - trace.x[20][p]) <= 1e-12);
}

TEST_CASE("validity and contraction invariants") {
    for (auto kind : {NetworkModel::Kind::Rooted, NetworkModel::Kind::Nonsplit,
                      NetworkModel::Kind::SenderFaulty}) {
        NetworkModel model = make_model(kind, 6, 99);
        model.f = 2;
        const CommPattern pattern{model};
        Rng rng(13);
        ValueVector x0(6);
        for (double& v : x0) v = rng.next_unit();
        const double lo = *std::min_element(x0.begin(), x0.end());
        const double hi = *std::max_element(x0.begin(), x0.end());
        const ExecutionTrace trace =
            run_synchronous(pattern, WeightRule::equal_neighbor(), x0, 50);
        for (int k = 1; k <= 50; ++k) {
            for (double v : trace.x[k]) {
                CHECK(v >= lo - 1e-12);
                CHECK(v <= hi + 1e-12);
            }
            CHECK(trace.delta_history[k] <= trace.delta_history[k - 1] + 1e-15);
        }
    }
}

TEST_CASE("x0 outside the unit interval is rejected") {
    const CommPattern pattern{complete_model(2, 1)};
    CHECK_THROWS_AS(
        (void)run_synchronous(pattern, WeightRule::equal_neighbor(),
                              ValueVector{0.5, 1.5}, 1),
        ValidationError);
}

TEST_CASE("delay schedule policies and validation") {
    DelaySchedule max_delay{.delta = 3, .policy = DelaySchedule::Policy::MaxDelay};
    CHECK(max_delay.kappa(10, 0, 0) == 9);   // own value always current
    CHECK(max_delay.kappa(10, 0, 1) == 7);   // k - delta

    DelaySchedule uniform{.delta = 4, .policy = DelaySchedule::Policy::UniformRandom,
                          .seed = 99};
    for (int k = 5; k < 50; ++k)
        for (Process p = 0; p < 3; ++p)
            for (Process q = 0; q < 3; ++q) {
                const int v = uniform.kappa(k, p, q);
                CHECK(v >= k - 4);
                CHECK(v <= k - 1);
                CHECK(v == uniform.kappa(k, p, q));  // pure function
            }

    // non-FIFO, duplicating custom schedules are accepted...
    DelaySchedule custom{.delta = 2, .policy = DelaySchedule::Policy::Custom};
    custom.custom = [](int k, Process, Process) { return k % 2 == 0 ? k - 2 : k - 1; };
    CHECK(custom.kappa(4, 0, 1) == 2);
    CHECK(custom.kappa(5, 0, 1) == 4);

    // ...but values outside the window are not
    DelaySchedule bad{.delta = 2, .policy = DelaySchedule::Policy::Custom};
    bad.custom = [](int k, Process, Process) { return k - 3; };
    CHECK_THROWS_AS((void)bad.kappa(5, 0, 1), ValidationError);

    DelaySchedule zero{.delta = 0};
    CHECK_THROWS_AS(zero.validate(), ConfigError);
}

TEST_CASE("delta=1 delayed run is the synchronous run") {
    const CommPattern pattern{make_model(NetworkModel::Kind::Nonsplit, 5, 31)};
    Rng rng(7);
    ValueVector x0(5);
    for (double& v : x0) v = rng.next_unit();
    const ExecutionTrace sync = run_synchronous(pattern, WeightRule::equal_neighbor(), x0, 30);
    DelaySchedule schedule;  // delta 1, zero delay
    const ExecutionTrace delayed =
        run_delayed(pattern, WeightRule::equal_neighbor(), x0, schedule, 30);
    for (int k = 0; k <= 30; ++k)
        for (int p = 0; p < 5; ++p) CHECK(sync.x[k][p] == delayed.x[k][p]);
}

TEST_CASE("max-delay on the complete graph: hand-computed first round") {
    // delta = 2, two processes, x0 = (0,1): round 1 clamps to x(0) either
    // way, so both average to 1/2
    const CommPattern pattern{complete_model(2, 3)};
    DelaySchedule schedule{.delta = 2, .policy = DelaySchedule::Policy::MaxDelay};
    const ExecutionTrace trace = run_delayed(pattern, WeightRule::equal_neighbor(),
                                             ValueVector{0.0, 1.0}, schedule, 4);
    CHECK(trace.x[1][0] == 0.5);
    CHECK(trace.x[1][1] == 0.5);
    // round 2 reaches back to x(0), so the initial extremes resurface
    CHECK(trace.x[2][0] == 0.75);
    CHECK(trace.x[2][1] == 0.25);
    CHECK(trace.delta_history[4] == doctest::Approx(0.125));
}

TEST_CASE("virtual matrix layout follows the delay reduction") {
    // complete graph n=2, delta=3, max delay; W = equal neighbor
    std::vector<double> rows{0.5, 0.5, 0.5, 0.5};
    const StochasticMatrix w = StochasticMatrix::from_rows(2, rows);
    DelaySchedule schedule{.delta = 3, .policy = DelaySchedule::Policy::MaxDelay};
    const StochasticMatrix vw = build_virtual_matrix(w, schedule, 5);
    CHECK(vw.size() == 6);
    // current slot of p=0 is row 2: self at age 0 (column 2), sender 1 at
    // age delta-1 = 2 (column 3)
    CHECK(vw(2, 2) == 0.5);
    CHECK(vw(2, 3) == 0.5);
    // shift rows copy the next-younger slot
    CHECK(vw(0, 1) == 1.0);
    CHECK(vw(1, 2) == 1.0);
    CHECK(vw.row_sum_drift() == 0.0);
    // self-loop only at the current slots
    const Digraph vg = associated_graph(vw);
    CHECK(vg.has_edge(2, 2));
    CHECK_FALSE(vg.has_edge(0, 0));
    CHECK_FALSE(vg.has_edge(1, 1));
}

TEST_CASE("virtual run reproduces the delayed run exactly") {
    Rng seeds(4242);
    int scenarios = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + seeds.next_below(5);
        const int delta = 1 + seeds.next_below(4);
        NetworkModel model = make_model(
            trial % 2 == 0 ? NetworkModel::Kind::Nonsplit : NetworkModel::Kind::Rooted, n,
            seeds.next_u64());
        const CommPattern pattern{model};
        DelaySchedule schedule{.delta = delta,
                               .policy = DelaySchedule::Policy::UniformRandom,
                               .seed = seeds.next_u64()};
        ValueVector x0(n);
        for (double& v : x0) v = seeds.next_unit();
        const WeightRule rule =
            trial % 3 == 0 ? WeightRule::fixed_weight() : WeightRule::equal_neighbor();
        const VirtualRunReport report = run_virtual(pattern, rule, x0, schedule, 60);
        CHECK(report.max_divergence == 0.0);
        // shifted components carry the history: x~[slot(p,d)](k) = x_p(k-d)
        for (int k = 0; k <= 60; ++k)
            for (int p = 0; p < n; ++p)
                for (int d = 0; d < delta; ++d) {
                    const int slot = p * delta + (delta - 1 - d);
                    const double expect = report.delayed_trace.x[std::max(0, k - d)][p];
                    CHECK(report.virtual_trace.x[k][slot] == expect);
                }
        ++scenarios;
    }
    CHECK(scenarios == 60);
}

TEST_CASE("decision rounds follow the bound formulas") {
    // nonsplit, equal neighbor at n=5, eps = 1/e: exactly 5 rounds
    BoundParams nonsplit{ModelClass::Nonsplit, 5, 0.2, 0, 1};
    CHECK(decision_round(nonsplit, std::exp(-1.0)) == 5);

    BoundParams coordinated{ModelClass::Coordinated, 4, 0.25, 0, 1};
    const long long coord = decision_round(coordinated, 1e-3);
    CHECK(coord == static_cast<long long>(std::ceil(4 * 256 * std::log(1e3))) + 3);

    // delayed with delta=1 degenerates to the synchronous formulas
    BoundParams d1{ModelClass::NonsplitDelayed, 5, 0.2, 0, 1};
    CHECK(decision_round(d1, 1e-4) == decision_round(
        BoundParams{ModelClass::Nonsplit, 5, 0.2, 0, 1}, 1e-4));
    BoundParams c1{ModelClass::CoordinatedDelayed, 5, 0.2, 0, 1};
    CHECK(decision_round(c1, 1e-4) ==
          decision_round(BoundParams{ModelClass::Coordinated, 5, 0.2, 0, 1}, 1e-4));

    BoundParams k2{ModelClass::KNonsplit, 3, 1.0 / 3, 2, 1};
    CHECK(decision_round(k2, 1e-2) ==
          static_cast<long long>(std::ceil(2 * 9 * std::log(100.0))) + 1);

    CHECK_THROWS_AS((void)decision_round(BoundParams{ModelClass::Unsolvable, 4, 0.25, 0, 1},
                                         1e-3),
                    DomainError);
}

TEST_CASE("decide stamps every process once at the bound") {
    const CommPattern pattern{make_model(NetworkModel::Kind::Nonsplit, 4, 11)};
    ValueVector x0{0.0, 1.0, 0.25, 0.75};
    ExecutionTrace trace = run_synchronous(pattern, WeightRule::equal_neighbor(), x0, 60);
    BoundParams params{ModelClass::Nonsplit, 4, 0.25, 0, 1};
    const long long round = decide(trace, params, 1e-4);
    CHECK(round == static_cast<long long>(std::ceil(4 * std::log(1e4))));
    for (int p = 0; p < 4; ++p) {
        REQUIRE(trace.decisions[p].has_value());
        CHECK(trace.decisions[p]->round == round);
        CHECK(trace.decisions[p]->value == trace.x[round][p]);
    }
    // epsilon-agreement at the decision round
    CHECK(delta_seminorm(trace.x[round]) <= 1e-4);
    CHECK_THROWS_AS((void)decide(trace, params, 1e-4), EquivalenceError);

    ExecutionTrace shorty = run_synchronous(pattern, WeightRule::equal_neighbor(), x0, 3);
    CHECK_THROWS_AS((void)decide(shorty, params, 1e-4), DomainError);
}

TEST_CASE("decided values satisfy epsilon-agreement over random scenarios") {
    Rng seeds(1234);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + seeds.next_below(4);
        NetworkModel model = make_model(NetworkModel::Kind::Nonsplit, n, seeds.next_u64());
        const CommPattern pattern{model};
        ValueVector x0(n);
        for (double& v : x0) v = seeds.next_unit();
        const double eps = 1e-3;
        BoundParams params{ModelClass::Nonsplit, n, 1.0 / n, 0, 1};
        const long long bound = decision_round(params, eps);
        ExecutionTrace trace =
            run_synchronous(pattern, WeightRule::equal_neighbor(), x0, static_cast<int>(bound));
        decide(trace, params, eps);
        CHECK(delta_seminorm(trace.x[bound]) <= eps);
    }
}

TEST_CASE("classification") {
    CHECK(classify(make_model(NetworkModel::Kind::Nonsplit, 5, 0), 1) == ModelClass::Nonsplit);
    CHECK(classify(make_model(NetworkModel::Kind::Nonsplit, 5, 0), 3) ==
          ModelClass::NonsplitDelayed);
    CHECK(classify(make_model(NetworkModel::Kind::Rooted, 5, 0), 1) == ModelClass::Coordinated);
    CHECK(classify(make_model(NetworkModel::Kind::Rooted, 5, 0), 2) ==
          ModelClass::CoordinatedDelayed);
    CHECK(classify(make_model(NetworkModel::Kind::NonRootedWitness, 5, 0), 1) ==
          ModelClass::Unsolvable);
    NetworkModel faults = make_model(NetworkModel::Kind::CompleteLinkFaults, 5, 0);
    faults.budget = 2 * 5 - 3;
    CHECK(classify(faults, 1) == ModelClass::Coordinated);
    faults.budget = 2 * 5 - 2;
    CHECK(classify(faults, 1) == ModelClass::Unsolvable);
}

TEST_CASE("macro run on rooted patterns") {
    NetworkModel model = make_model(NetworkModel::Kind::Rooted, 5, 2024);
    const CommPattern pattern{model};
    ValueVector x0{0.0, 1.0, 0.5, 0.25, 0.75};
    const int step_cap = static_cast<int>(std::ceil(5 * std::log(1e6))) + 1;
    const MacroRunResult macro = run_macro(pattern, x0, step_cap, 1e-6);
    CHECK(macro.trace.delta_history.back() <= 1e-6);
    CHECK(macro.steps <= step_cap);
    CHECK(macro.underlying_rounds == macro.steps * 4);
}
