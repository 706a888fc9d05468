#include "dynagree/scenario.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "dynagree/errors.hpp"
#include "dynagree/rng.hpp"

namespace dynagree {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

int get_int(const json& obj, const std::string& path) {
    if (!obj.is_number_integer() && !obj.is_number_unsigned())
        fail(path, "expected an integer");
    return obj.get<int>();
}

double get_num(const json& obj, const std::string& path) {
    if (!obj.is_number()) fail(path, "expected a number");
    return obj.get<double>();
}

std::uint64_t get_seed(const json& obj, const std::string& path) {
    if (obj.is_number_unsigned()) return obj.get<std::uint64_t>();
    if (obj.is_number_integer()) {
        const auto v = obj.get<std::int64_t>();
        if (v < 0) fail(path, "seed must be nonnegative");
        return static_cast<std::uint64_t>(v);
    }
    fail(path, "expected an integer seed");
}

NetworkModel parse_model(const json& j) {
    if (!j.is_object()) fail("model", "expected an object");
    require_keys(j, "model", {"kind", "n", "m", "f", "budget", "density", "strategy"});
    if (!j.contains("kind")) fail("model.kind", "required");
    const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";

    NetworkModel model;
    if (kind == "rooted") model.kind = NetworkModel::Kind::Rooted;
    else if (kind == "nonsplit") model.kind = NetworkModel::Kind::Nonsplit;
    else if (kind == "complete_link_faults") model.kind = NetworkModel::Kind::CompleteLinkFaults;
    else if (kind == "sender_faulty") model.kind = NetworkModel::Kind::SenderFaulty;
    else if (kind == "butterfly") model.kind = NetworkModel::Kind::Butterfly;
    else if (kind == "bidirectional_connected")
        model.kind = NetworkModel::Kind::BidirectionalConnected;
    else if (kind == "non_rooted_witness") model.kind = NetworkModel::Kind::NonRootedWitness;
    else if (kind == "async_crash_majority") model.kind = NetworkModel::Kind::AsyncCrashMajority;
    else fail("model.kind", "unknown model kind '" + kind + "'");

    if (j.contains("n")) model.n = get_int(j["n"], "model.n");
    if (j.contains("m")) model.m = get_int(j["m"], "model.m");
    if (j.contains("f")) model.f = get_int(j["f"], "model.f");
    if (j.contains("budget")) model.budget = get_int(j["budget"], "model.budget");
    if (j.contains("density")) model.density = get_num(j["density"], "model.density");
    if (j.contains("strategy")) {
        const std::string s =
            j["strategy"].is_string() ? j["strategy"].get<std::string>() : "";
        if (s == "random") model.strategy = FaultStrategy::Random;
        else if (s == "adversarial_bipartition")
            model.strategy = FaultStrategy::AdversarialBipartition;
        else if (s == "rotating") model.strategy = FaultStrategy::Rotating;
        else fail("model.strategy", "unknown strategy '" + s + "'");
    }
    if (model.kind == NetworkModel::Kind::Butterfly && model.n == 0) model.n = 2 * model.m;
    model.validate();
    return model;
}

WeightRule parse_rule(const json& j) {
    if (!j.is_object()) fail("rule", "expected an object");
    require_keys(j, "rule", {"kind", "alpha", "f"});
    if (!j.contains("kind")) fail("rule.kind", "required");
    const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";

    WeightRule rule;
    if (kind == "equal_neighbor") rule = WeightRule::equal_neighbor();
    else if (kind == "fixed_weight") rule = WeightRule::fixed_weight();
    else if (kind == "reduce") rule = WeightRule::reduce(0);
    else if (kind == "center") rule = WeightRule::center(0);
    else if (kind == "macro_round") rule = WeightRule::macro_round();
    else fail("rule.kind", "unknown rule kind '" + kind + "'");

    if (j.contains("alpha")) {
        if (rule.kind != WeightRule::Kind::FixedWeight)
            fail("rule.alpha", "only fixed_weight takes alpha");
        if (!j["alpha"].is_array()) fail("rule.alpha", "expected an array");
        for (const auto& a : j["alpha"])
            rule.alpha.push_back(get_num(a, "rule.alpha[]"));
    }
    if (j.contains("f")) {
        if (rule.kind != WeightRule::Kind::Reduce && rule.kind != WeightRule::Kind::Center)
            fail("rule.f", "only reduce and center take f");
        rule.f = get_int(j["f"], "rule.f");
    }
    return rule;
}

InitSpec parse_init(const json& j) {
    InitSpec init;
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "uniform_random") init.kind = InitSpec::Kind::UniformRandom;
        else if (s == "split_halves") init.kind = InitSpec::Kind::SplitHalves;
        else fail("init", "unknown init kind '" + s + "'");
    } else if (j.is_array()) {
        init.kind = InitSpec::Kind::Explicit;
        for (const auto& v : j) init.values.push_back(get_num(v, "init[]"));
    } else {
        fail("init", "expected a string or an array of values");
    }
    return init;
}

Scenario parse_scenario(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    require_keys(j, "", {"model", "rule", "epsilon", "delta", "delay_policy", "seed",
                         "rounds_cap", "init", "full_trace", "retain_matrices"});
    Scenario sc;
    if (!j.contains("model")) fail("model", "required");
    sc.model = parse_model(j["model"]);
    if (!j.contains("rule")) fail("rule", "required");
    sc.rule = parse_rule(j["rule"]);
    sc.rule.validate(sc.model.n);

    if (j.contains("epsilon")) {
        sc.epsilon = get_num(j["epsilon"], "epsilon");
        if (!(sc.epsilon > 0.0)) fail("epsilon", "must be positive");
    }
    if (j.contains("delta")) {
        sc.delta = get_int(j["delta"], "delta");
        if (sc.delta < 1) fail("delta", "must be >= 1");
    }
    if (j.contains("delay_policy")) {
        const std::string s = j["delay_policy"].is_string()
                                  ? j["delay_policy"].get<std::string>()
                                  : "";
        if (s == "zero") sc.delay_policy = DelaySchedule::Policy::ZeroDelay;
        else if (s == "max") sc.delay_policy = DelaySchedule::Policy::MaxDelay;
        else if (s == "uniform") sc.delay_policy = DelaySchedule::Policy::UniformRandom;
        else if (s == "alternating") sc.delay_policy = DelaySchedule::Policy::Alternating;
        else fail("delay_policy", "unknown policy '" + s + "'");
    }
    if (j.contains("seed")) {
        sc.seed = get_seed(j["seed"], "seed");
        sc.has_seed = true;
    }
    if (j.contains("rounds_cap")) {
        sc.rounds_cap = get_int(j["rounds_cap"], "rounds_cap");
        if (sc.rounds_cap < 0) fail("rounds_cap", "must be >= 0");
    }
    if (j.contains("init")) sc.init = parse_init(j["init"]);
    if (j.contains("full_trace")) {
        if (!j["full_trace"].is_boolean()) fail("full_trace", "expected a boolean");
        sc.full_trace = j["full_trace"].get<bool>();
    }
    if (j.contains("retain_matrices")) {
        if (!j["retain_matrices"].is_boolean()) fail("retain_matrices", "expected a boolean");
        sc.retain_matrices = j["retain_matrices"].get<bool>();
    }
    if (sc.init.kind == InitSpec::Kind::Explicit &&
        static_cast<int>(sc.init.values.size()) != sc.model.n)
        fail("init", "expected " + std::to_string(sc.model.n) + " values");
    return sc;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_scenario(j);
}

std::string with_seed(const std::string& config_json, std::uint64_t seed) {
    json j;
    try {
        j = json::parse(config_json);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    j["seed"] = seed;
    return j.dump();
}

ValueVector initial_values(const Scenario& scenario) {
    const int n = scenario.model.n;
    switch (scenario.init.kind) {
        case InitSpec::Kind::UniformRandom: {
            Rng rng(split_seed(scenario.seed, 2));
            ValueVector x0(n);
            for (double& v : x0) v = rng.next_unit();
            return x0;
        }
        case InitSpec::Kind::SplitHalves: {
            ValueVector x0(n, 1.0);
            for (int p = 0; p < (n + 1) / 2; ++p) x0[p] = 0.0;
            return x0;
        }
        case InitSpec::Kind::Explicit:
            return scenario.init.values;
    }
    throw ConfigError("init: unknown kind");
}

DelaySchedule scenario_schedule(const Scenario& scenario) {
    DelaySchedule schedule;
    schedule.delta = scenario.delta;
    schedule.policy = scenario.delay_policy;
    schedule.seed = split_seed(scenario.seed, 1);
    return schedule;
}

BoundSuiteResult run_scenario(const Scenario& scenario) {
    Scenario sc = scenario;
    sc.model.seed = sc.seed;
    const DelaySchedule schedule = scenario_schedule(sc);
    const ValueVector x0 = initial_values(sc);
    BoundSuiteResult result =
        bound_suite(sc.model, sc.rule, schedule, sc.epsilon, x0, sc.rounds_cap);
    if (result.report.solvable && result.report.theorem_bound >= 0 &&
        result.trace.rounds() >= result.report.theorem_bound &&
        sc.rule.kind != WeightRule::Kind::MacroRound) {
        const ModelClass cls = classify(sc.model, schedule.delta);
        BoundParams params{cls, sc.model.n, sc.rule.rho(sc.model.n), 0, schedule.delta};
        decide(result.trace, params, sc.epsilon);
    }
    return result;
}

namespace {

void apply_path(json& doc, const std::string& path, double value) {
    json* node = &doc;
    std::size_t pos = 0;
    std::string walked;
    while (true) {
        const std::size_t dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        walked = walked.empty() ? key : walked + "." + key;
        if (!node->is_object()) fail(walked, "not an object");
        if (dot == std::string::npos) {
            if (value == std::floor(value) && std::abs(value) < 9e15)
                (*node)[key] = static_cast<std::int64_t>(value);
            else
                (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

}  // namespace

std::vector<SweepRow> run_sweep(const std::string& base_json,
                                std::span<const SweepAxis> axes, int workers,
                                long long max_cells) {
    if (axes.empty()) throw ConfigError("sweep: no axes given");
    json base;
    try {
        base = json::parse(base_json);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    long long cells = 1;
    for (const auto& axis : axes) {
        if (axis.values.empty()) throw ConfigError("sweep: axis '" + axis.path + "' is empty");
        cells *= static_cast<long long>(axis.values.size());
        if (cells > max_cells) throw BudgetError("sweep: grid exceeds " +
                                                 std::to_string(max_cells) + " cells");
    }

    // Materialize every cell's config up front; workers then only run them.
    std::vector<SweepRow> rows(cells);
    std::vector<Scenario> scenarios(cells);
    for (long long cell = 0; cell < cells; ++cell) {
        json doc = base;
        long long rest = cell;
        for (const auto& axis : axes) {
            const double v = axis.values[rest % axis.values.size()];
            rest /= static_cast<long long>(axis.values.size());
            apply_path(doc, axis.path, v);
            rows[cell].params.emplace_back(axis.path, v);
        }
        scenarios[cell] = parse_scenario(doc);
    }

    std::atomic<long long> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;
    auto work = [&] {
        while (true) {
            const long long cell = next.fetch_add(1);
            if (cell >= cells || failed.load()) break;
            try {
                rows[cell].report = run_scenario(scenarios[cell]).report;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };
    const int thread_count = std::max(1, std::min<int>(workers, static_cast<int>(cells)));
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failed.load()) throw ConfigError("sweep: " + first_error);
    return rows;
}

}  // namespace dynagree
