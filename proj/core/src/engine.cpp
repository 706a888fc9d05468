#include "dynagree/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynagree/errors.hpp"
#include "dynagree/rng.hpp"

namespace dynagree {

int DelaySchedule::kappa(int k, Process p, Process q) const {
    if (q == p) return k - 1;
    switch (policy) {
        case Policy::ZeroDelay:
            return k - 1;
        case Policy::MaxDelay:
            return k - delta;
        case Policy::UniformRandom: {
            const std::uint64_t key =
                split_seed(seed, (static_cast<std::uint64_t>(k) << 32) ^
                                     (static_cast<std::uint64_t>(p) << 16) ^
                                     static_cast<std::uint64_t>(q));
            return k - 1 - static_cast<int>(key % static_cast<std::uint64_t>(delta));
        }
        case Policy::Alternating:
            return (k + p + q) % 2 == 0 ? k - 1 : k - delta;
        case Policy::Custom: {
            const int v = custom(k, p, q);
            if (v < k - delta || v > k - 1)
                throw ValidationError("delay schedule: kappa(" + std::to_string(k) + "," +
                                      std::to_string(p + 1) + "," + std::to_string(q + 1) +
                                      ") = " + std::to_string(v) + " outside its window");
            return v;
        }
    }
    throw ConfigError("unknown delay policy");
}

void DelaySchedule::validate() const {
    if (delta < 1) throw ConfigError("schedule.delta: must be >= 1");
    if (policy == Policy::Custom && !custom)
        throw ConfigError("schedule: custom policy without a function");
}

std::string DelaySchedule::policy_name() const {
    switch (policy) {
        case Policy::ZeroDelay: return "zero";
        case Policy::MaxDelay: return "max";
        case Policy::UniformRandom: return "uniform";
        case Policy::Alternating: return "alternating";
        case Policy::Custom: return "custom";
    }
    return "?";
}

namespace {

void check_initial_values(std::span<const double> x0) {
    if (x0.empty()) throw DomainError("run: empty initial state");
    for (double v : x0)
        if (!(v >= 0.0 && v <= 1.0))
            throw ValidationError("run: initial values must lie in [0,1]");
}

}  // namespace

ExecutionTrace run_delayed(const CommPattern& pattern, const WeightRule& rule,
                           std::span<const double> x0, const DelaySchedule& schedule,
                           int rounds, RunOptions options) {
    check_initial_values(x0);
    schedule.validate();
    const int n = static_cast<int>(x0.size());
    if (pattern.node_count() != n) throw DomainError("run: pattern and x0 disagree on n");
    rule.validate(n);
    if (rule.kind == WeightRule::Kind::MacroRound)
        throw ConfigError("macro_round runs through run_macro");

    const int delta = schedule.delta;
    ExecutionTrace trace;
    trace.x.reserve(rounds + 1);
    trace.x.emplace_back(x0.begin(), x0.end());
    trace.delta_history.push_back(delta_seminorm(x0));
    trace.decisions.assign(n, std::nullopt);

    // ring[d] = x(k-1-d); prefilled with x0 so x(-j) = x(0) falls out.
    std::vector<ValueVector> ring(delta, ValueVector(x0.begin(), x0.end()));
    ValueVector gathered(n, 0.0);
    std::vector<double> matrix_rows;

    for (int k = 1; k <= rounds; ++k) {
        const CommGraph g = pattern.at(k);
        ValueVector next(n, 0.0);
        if (options.retain_matrices) matrix_rows.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (Process p = 0; p < n; ++p) {
            const ProcessSet& in = g.graph().in_set(p);
            std::fill(gathered.begin(), gathered.end(), 0.0);
            in.for_each([&](Process q) {
                const int age = k - 1 - schedule.kappa(k, p, q);
                gathered[q] = ring[age][q];
            });
            ReceiverUpdate up = rule_update(rule, n, k, p, in, gathered);
            next[p] = up.value;
            if (options.retain_matrices)
                std::copy(up.weights.begin(), up.weights.end(),
                          matrix_rows.begin() + static_cast<std::size_t>(p) * n);
        }
        if (options.retain_matrices)
            trace.matrices.push_back(StochasticMatrix::from_rows(n, matrix_rows));
        // shift the ring: drop the oldest, file the new vector as age 0
        for (int d = delta - 1; d > 0; --d) ring[d] = std::move(ring[d - 1]);
        ring[0] = next;
        trace.delta_history.push_back(delta_seminorm(next));
        trace.x.push_back(std::move(next));
    }
    return trace;
}

ExecutionTrace run_synchronous(const CommPattern& pattern, const WeightRule& rule,
                               std::span<const double> x0, int rounds, RunOptions options) {
    DelaySchedule sync;  // delta = 1, zero delay
    return run_delayed(pattern, rule, x0, sync, rounds, options);
}

StochasticMatrix build_virtual_matrix(const StochasticMatrix& round_weights,
                                      const DelaySchedule& schedule, int round) {
    const int n = round_weights.size();
    const int delta = schedule.delta;
    const int vn = n * delta;
    std::vector<double> rows(static_cast<std::size_t>(vn) * vn, 0.0);
    // Slot p*delta + (delta-1-d) holds x_p(k-d); the current slot is the
    // last of the block.
    auto slot = [delta](Process p, int age) { return p * delta + (delta - 1 - age); };
    for (Process p = 0; p < n; ++p) {
        const int row_cur = slot(p, 0);
        for (Process q = 0; q < n; ++q) {
            const double w = round_weights(p, q);
            if (w == 0.0) continue;
            const int age = round - 1 - schedule.kappa(round, p, q);
            rows[static_cast<std::size_t>(row_cur) * vn + slot(q, age)] = w;
        }
        for (int age = 1; age < delta; ++age)
            rows[static_cast<std::size_t>(slot(p, age)) * vn + slot(p, age - 1)] = 1.0;
    }
    return StochasticMatrix::from_rows(vn, rows);
}

VirtualRunReport run_virtual(const CommPattern& pattern, const WeightRule& rule,
                             std::span<const double> x0, const DelaySchedule& schedule,
                             int rounds, RunOptions options) {
    check_initial_values(x0);
    schedule.validate();
    const int n = static_cast<int>(x0.size());
    const int delta = schedule.delta;
    const int vn = n * delta;

    VirtualRunReport report;
    report.delayed_trace =
        run_delayed(pattern, rule, x0, schedule, rounds, {.retain_matrices = true});

    ExecutionTrace& vt = report.virtual_trace;
    ValueVector vx(vn);
    for (Process p = 0; p < n; ++p)
        for (int j = 0; j < delta; ++j) vx[p * delta + j] = x0[p];  // x(-j) = x(0)
    vt.x.push_back(vx);
    vt.delta_history.push_back(delta_seminorm(vx));
    vt.decisions.assign(vn, std::nullopt);

    for (int k = 1; k <= rounds; ++k) {
        const StochasticMatrix& w = report.delayed_trace.matrices[k - 1];
        const StochasticMatrix vw = build_virtual_matrix(w, schedule, k);
        vx = apply_matrix(vw, vx);
        if (options.retain_matrices) vt.matrices.push_back(vw);
        vt.delta_history.push_back(delta_seminorm(vx));
        vt.x.push_back(vx);

        for (Process p = 0; p < n; ++p) {
            const double virt = vx[p * delta + (delta - 1)];
            const double direct = report.delayed_trace.x[k][p];
            if (virt != direct)
                throw EquivalenceError(
                    "virtual reduction diverged from the delayed run at round " +
                    std::to_string(k) + ", process " + std::to_string(p + 1) + " by " +
                    std::to_string(std::abs(virt - direct)));
        }
    }
    if (!options.retain_matrices) report.delayed_trace.matrices.clear();
    return report;
}

MacroRunResult run_macro(const CommPattern& pattern, std::span<const double> x0,
                         int max_steps, double stop_epsilon) {
    check_initial_values(x0);
    const int n = static_cast<int>(x0.size());
    if (n < 2) throw DomainError("run_macro: needs n >= 2");
    const int block = n - 1;

    MacroRunResult result;
    result.trace.x.emplace_back(x0.begin(), x0.end());
    result.trace.delta_history.push_back(delta_seminorm(x0));
    result.trace.decisions.assign(n, std::nullopt);

    ValueVector current(x0.begin(), x0.end());
    std::vector<CommGraph> graphs;
    for (int step = 1; step <= max_steps; ++step) {
        graphs.clear();
        for (int r = 0; r < block; ++r)
            graphs.push_back(pattern.at((step - 1) * block + r + 1));
        current = macro_round_equal_neighbor(graphs, current);
        result.trace.delta_history.push_back(delta_seminorm(current));
        result.trace.x.push_back(current);
        result.steps = step;
        result.underlying_rounds = step * block;
        if (stop_epsilon > 0.0 && result.trace.delta_history.back() <= stop_epsilon) break;
    }
    return result;
}

namespace {

// Rounds the formula value up while absorbing floating-point noise sitting
// exactly on an integer boundary.
long long ceil_rounds(double v) { return static_cast<long long>(std::ceil(v - 1e-9)); }

}  // namespace

long long decision_round(const BoundParams& params, double epsilon) {
    if (epsilon <= 0.0) throw DomainError("decision_round: epsilon must be positive");
    if (params.rho <= 0.0 && params.cls != ModelClass::Unsolvable)
        throw DomainError("decision_round: rho must be positive");
    const double log_eps = std::log(1.0 / epsilon);
    const double inv_rho = 1.0 / params.rho;
    switch (params.cls) {
        case ModelClass::Nonsplit:
            return ceil_rounds(inv_rho * log_eps);
        case ModelClass::KNonsplit: {
            const int k = params.k_nonsplit;
            if (k < 1) throw DomainError("decision_round: K must be >= 1");
            return ceil_rounds(k * std::pow(inv_rho, k) * log_eps) + k - 1;
        }
        case ModelClass::Coordinated:
            return ceil_rounds(params.n * std::pow(inv_rho, params.n) * log_eps) + params.n - 1;
        case ModelClass::NonsplitDelayed: {
            const int w = 2 * params.delta - 1;
            return ceil_rounds(w * std::pow(inv_rho, w) * log_eps) + w - 1;
        }
        case ModelClass::CoordinatedDelayed: {
            const int w = params.n * params.delta;
            return ceil_rounds(w * std::pow(inv_rho, w) * log_eps) + w - 1;
        }
        case ModelClass::Unsolvable:
            throw DomainError("decision_round: no bound exists for an unsolvable model");
    }
    throw DomainError("decision_round: unknown class");
}

ModelClass classify(const NetworkModel& model, int delta) {
    if (!model.coordinated_class()) return ModelClass::Unsolvable;
    if (model.nonsplit_class())
        return delta > 1 ? ModelClass::NonsplitDelayed : ModelClass::Nonsplit;
    return delta > 1 ? ModelClass::CoordinatedDelayed : ModelClass::Coordinated;
}

long long decide(ExecutionTrace& trace, const BoundParams& params, double epsilon) {
    const long long round = decision_round(params, epsilon);
    if (round > trace.rounds())
        throw DomainError("decide: trace stops at round " + std::to_string(trace.rounds()) +
                          ", before the decision round " + std::to_string(round));
    for (Process p = 0; p < trace.n(); ++p) {
        if (trace.decisions[p])
            throw EquivalenceError("decide: process " + std::to_string(p + 1) +
                                   " already decided");
        trace.decisions[p] = Decision{static_cast<int>(round), trace.x[round][p]};
    }
    return round;
}

}  // namespace dynagree
