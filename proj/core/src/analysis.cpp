#include "dynagree/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "dynagree/errors.hpp"
#include "dynagree/rng.hpp"

namespace dynagree {

std::optional<long long> convergence_round(const ExecutionTrace& trace, double eps) {
    if (eps <= 0.0) throw DomainError("convergence_round: epsilon must be positive");
    for (int k = 0; k <= trace.rounds(); ++k)
        if (trace.delta_history[k] <= eps) return k;
    return std::nullopt;
}

SolvabilityVerdict decide_solvability(std::span<const CommGraph> model) {
    for (const CommGraph& g : model)
        if (!is_rooted(g)) return {false, g};
    return {true, std::nullopt};
}

ConsensusSetVerdict consensus_set_check(std::span<const StochasticMatrix> matrices,
                                        std::uint64_t seed, int probes, int length) {
    if (matrices.empty()) throw DomainError("consensus_set_check: empty set");
    ConsensusSetVerdict verdict;
    verdict.consensus_set = true;
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        const auto& m = matrices[i];
        for (int p = 0; p < m.size(); ++p)
            if (!(m(p, p) > 0.0))
                throw DomainError("consensus_set_check: zero diagonal in matrix " +
                                  std::to_string(i + 1));
        if (verdict.consensus_set && !is_rooted(associated_graph(m))) {
            verdict.consensus_set = false;
            verdict.non_rooted_index = static_cast<int>(i);
        }
    }
    for (int probe = 0; probe < probes; ++probe) {
        Rng rng(split_seed(seed, static_cast<std::uint64_t>(probe)));
        StochasticMatrix acc = matrices[rng.next_below(static_cast<int>(matrices.size()))];
        for (int step = 1; step < length; ++step) {
            const auto& next = matrices[rng.next_below(static_cast<int>(matrices.size()))];
            acc = multiply(next, acc);  // newer factors multiply on the left
        }
        verdict.probe_max_delta = std::max(verdict.probe_max_delta, delta_coeff(acc));
    }
    return verdict;
}

namespace {

std::optional<double> round_delta_bound_for(const NetworkModel& model, const WeightRule& rule) {
    const int n = model.n;
    switch (rule.kind) {
        case WeightRule::Kind::Reduce:
            return static_cast<double>(rule.f) / (n - rule.f);
        case WeightRule::Kind::Center:
            return static_cast<double>(rule.f) / (2.0 * (n - rule.f));
        case WeightRule::Kind::EqualNeighbor:
            if (model.kind == NetworkModel::Kind::SenderFaulty)
                return static_cast<double>(model.f) / n;
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

}  // namespace

BoundSuiteResult bound_suite(const NetworkModel& model, const WeightRule& rule,
                             const DelaySchedule& schedule, double epsilon,
                             std::span<const double> x0, long long cap) {
    constexpr long long kSafetyCap = 1'000'000;
    model.validate();
    schedule.validate();
    CommPattern pattern(model);

    BoundSuiteResult result;
    result.report.epsilon = epsilon;

    const bool macro = rule.kind == WeightRule::Kind::MacroRound;
    if (macro && schedule.delta != 1)
        throw ConfigError("macro_round: only synchronous rounds (delta = 1)");

    ModelClass cls = classify(pattern.model(), schedule.delta);
    if (macro && cls != ModelClass::Unsolvable) {
        // Each block of n-1 rooted rounds collapses into one nonsplit
        // macro-round, so the macro-level clock obeys the nonsplit bound.
        cls = ModelClass::Nonsplit;
    }
    long long rounds = 0;
    if (cls == ModelClass::Unsolvable) {
        result.report.solvable = false;
        result.report.note =
            "model contains a non-rooted communication graph; approximate consensus "
            "is not solvable over it, so no decision-time bound exists";
        rounds = cap >= 0 ? cap : 1000;
    } else {
        BoundParams params{cls, pattern.model().n, rule.rho(pattern.model().n), 0,
                           schedule.delta};
        result.report.theorem_bound = decision_round(params, epsilon);
        rounds = cap >= 0 ? std::min(cap, result.report.theorem_bound)
                          : std::min(result.report.theorem_bound + 1, kSafetyCap);
    }

    result.round_delta_bound = round_delta_bound_for(pattern.model(), rule);
    const bool track_matrices = result.round_delta_bound.has_value();

    if (macro) {
        MacroRunResult macro_run = run_macro(pattern, x0, static_cast<int>(rounds), epsilon);
        result.trace = std::move(macro_run.trace);
        if (!result.report.note.empty()) result.report.note += "; ";
        result.report.note += "macro_round: rounds counted in macro steps of n-1 rounds each";
    } else {
        result.trace = run_delayed(pattern, rule, x0, schedule, static_cast<int>(rounds),
                                   {.retain_matrices = track_matrices});
    }

    if (track_matrices) {
        for (const auto& w : result.trace.matrices)
            result.max_round_delta = std::max(result.max_round_delta, delta_coeff(w));
        result.round_delta_ok = result.max_round_delta <= *result.round_delta_bound + 1e-12;
        result.trace.matrices.clear();
    }

    result.report.rounds_run = result.trace.rounds();
    result.report.delta_final = result.trace.delta_history.back();
    result.report.observed_round = convergence_round(result.trace, epsilon);
    result.report.bound_satisfied =
        result.report.solvable && result.report.observed_round.has_value() &&
        *result.report.observed_round <= result.report.theorem_bound;
    if (!result.report.solvable && !result.report.observed_round.has_value())
        result.report.note += "; the run did not converge, as the characterization predicts";
    return result;
}

ValueVector butterfly_closed_perron(int m) {
    const int n = 2 * m;
    ValueVector pi(n, 0.0);
    pi[0] = 1.0 / 5.0;
    for (int p = 2; p <= m - 1; ++p) pi[p - 1] = 3.0 / (5.0 * std::pow(2.0, p));
    pi[m - 1] = 3.0 / (5.0 * std::pow(2.0, m - 1));
    for (int p = 1; p <= m; ++p) pi[2 * m - p] = pi[p - 1];  // mirror
    return pi;
}

ButterflyReport butterfly_experiment(int m, double epsilon) {
    if (m < 3 || m > 12)
        throw BudgetError("butterfly_experiment: m must lie in [3, 12]");
    if (epsilon <= 0.0) throw DomainError("butterfly_experiment: epsilon must be positive");

    const CommGraph g = butterfly(m);
    const int n = 2 * m;
    std::vector<double> rows(static_cast<std::size_t>(n) * n, 0.0);
    ValueVector ignored(n, 0.0);
    for (Process p = 0; p < n; ++p) {
        auto up = equal_neighbor_update(n, p, g.graph().in_set(p), ignored);
        std::copy(up.weights.begin(), up.weights.end(),
                  rows.begin() + static_cast<std::size_t>(p) * n);
    }
    const StochasticMatrix w = StochasticMatrix::from_rows(n, rows);

    ButterflyReport rep;
    rep.m = m;
    const ValueVector closed = butterfly_closed_perron(m);
    const ValueVector numeric = perron_vector(w, 1e-15, 1'000'000);
    for (int p = 0; p < n; ++p)
        rep.perron_max_err = std::max(rep.perron_max_err, std::abs(numeric[p] - closed[p]));

    ProcessSet half(n);
    for (Process p = 0; p < m; ++p) half.insert(p);
    // The closed-form vector keeps the bottleneck ratio at full precision;
    // the numeric vector is only the cross-check above.
    rep.phi_half_split = phi_subset(w, closed, half);
    rep.phi_closed_form = 1.0 / (5.0 * std::pow(2.0, m - 2));
    rep.pi_min = *std::min_element(closed.begin(), closed.end());
    rep.second_modulus = second_eigenvalue_modulus(w);
    rep.spectral_gap = 1.0 - rep.second_modulus;

    // delta(W^k) by iterated multiplication, per the matrix-seminorm route.
    StochasticMatrix power = w;
    long long k = 1;
    constexpr long long kIterCap = 2'000'000;
    while (delta_coeff(power) > epsilon) {
        power = multiply(w, power);
        if (++k > kIterCap) throw IterationError("butterfly_experiment: power iteration cap hit");
    }
    rep.rounds_to_eps = k;
    return rep;
}

MacroComparison macro_vs_plain_comparison(int n, double epsilon, std::uint64_t seed,
                                          long long cap) {
    NetworkModel model;
    model.kind = NetworkModel::Kind::Rooted;
    model.n = n;
    model.seed = seed;
    model.density = 0.25;
    CommPattern pattern(model);

    ValueVector x0(n);
    Rng rng(split_seed(seed, 0x1771));
    for (double& v : x0) v = rng.next_unit();

    MacroComparison cmp;
    {
        const WeightRule rule = WeightRule::equal_neighbor();
        long long run_cap = 64;  // doubling cap, so short runs stay short
        while (true) {
            ExecutionTrace full = run_synchronous(pattern, rule, x0, static_cast<int>(run_cap));
            if (auto hit = convergence_round(full, epsilon)) {
                cmp.plain_rounds = *hit;
                break;
            }
            if (run_cap >= cap) break;
            run_cap = std::min(cap, run_cap * 2);
        }
    }
    {
        const int block = n - 1;
        const long long step_cap = std::max<long long>(1, cap / block);
        MacroRunResult macro =
            run_macro(pattern, x0, static_cast<int>(std::min<long long>(step_cap, 1'000'000)),
                      epsilon);
        if (macro.trace.delta_history.back() <= epsilon) {
            cmp.macro_steps = macro.steps;
            cmp.macro_underlying_rounds = macro.underlying_rounds;
        }
    }
    return cmp;
}

}  // namespace dynagree
