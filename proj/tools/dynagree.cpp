// Command line interface: scenario runs, parameter sweeps, model checking,
// the slow-mixing experiment, and graph export.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "dynagree/analysis.hpp"
#include "dynagree/engine.hpp"
#include "dynagree/errors.hpp"
#include "dynagree/io.hpp"
#include "dynagree/models.hpp"
#include "dynagree/scenario.hpp"
#include "dynagree/stochmat.hpp"

namespace fs = std::filesystem;
using namespace dynagree;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << content;
}

// precedence: --seed flag, config seed, DYNAGREE_SEED
void resolve_seed(Scenario& scenario, const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) {
        scenario.seed = *flag_seed;
        scenario.has_seed = true;
        return;
    }
    if (scenario.has_seed) return;
    if (const char* env = std::getenv("DYNAGREE_SEED")) {
        scenario.seed = std::strtoull(env, nullptr, 10);
        scenario.has_seed = true;
        return;
    }
    throw ConfigError("no seed: pass --seed, set config \"seed\", or export DYNAGREE_SEED");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string report_csv(const ConvergenceReport& rep, double max_round_delta,
                       const std::optional<double>& round_delta_bound) {
    std::ostringstream os;
    os << "epsilon,observed_round,theorem_bound,bound_satisfied,delta_final,rounds_run,"
          "solvable,max_round_delta,round_delta_bound\n";
    os << format_double(rep.epsilon) << ',';
    if (rep.observed_round) os << *rep.observed_round;
    os << ',' << rep.theorem_bound << ',' << bool_str(rep.bound_satisfied) << ','
       << format_double(rep.delta_final) << ',' << rep.rounds_run << ','
       << bool_str(rep.solvable) << ',' << format_double(max_round_delta) << ',';
    if (round_delta_bound) os << format_double(*round_delta_bound);
    os << '\n';
    return os.str();
}

void print_report(const Scenario& scenario, const BoundSuiteResult& result) {
    const auto& rep = result.report;
    std::cout << "scenario: " << scenario.model.kind_name() << " n=" << scenario.model.n
              << ", rule " << scenario.rule.name() << ", epsilon "
              << format_double(scenario.epsilon) << ", seed " << scenario.seed << "\n";
    if (scenario.delta > 1)
        std::cout << "delays: delta=" << scenario.delta << " policy="
                  << scenario_schedule(scenario).policy_name() << "\n";
    if (!rep.solvable) {
        std::cout << "verdict: unsolvable -- " << rep.note << "\n";
        std::cout << "delta after " << rep.rounds_run
                  << " rounds: " << format_double(rep.delta_final) << "\n";
        return;
    }
    std::cout << "theorem bound: " << rep.theorem_bound << " rounds\n";
    if (rep.observed_round)
        std::cout << "observed convergence: round " << *rep.observed_round << "\n";
    else
        std::cout << "observed convergence: not reached in " << rep.rounds_run
                  << " rounds\n";
    std::cout << "bound satisfied: " << (rep.bound_satisfied ? "yes" : "NO") << "\n";
    if (result.round_delta_bound)
        std::cout << "per-round delta(W): max " << format_double(result.max_round_delta)
                  << " vs ceiling " << format_double(*result.round_delta_bound) << " ("
                  << (result.round_delta_ok ? "ok" : "VIOLATED") << ")\n";
    if (!rep.note.empty()) std::cout << "note: " << rep.note << "\n";
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::string& out_dir, std::optional<long long> cap, bool retain,
            bool full_trace) {
    Scenario scenario = scenario_from_json(read_file(config_path));
    resolve_seed(scenario, seed);
    if (cap) scenario.rounds_cap = *cap;
    if (retain) scenario.retain_matrices = true;
    if (full_trace) scenario.full_trace = true;

    Scenario run_config = scenario;
    run_config.retain_matrices = false;  // matrices are re-derived below when asked
    const BoundSuiteResult result = run_scenario(run_config);
    print_report(scenario, result);

    const fs::path out(out_dir);
    {
        std::ostringstream os;
        write_summary_csv(os, result.trace);
        write_file(out / "summary.csv", os.str());
    }
    if (scenario.full_trace) {
        std::ostringstream os;
        write_trace_csv(os, result.trace);
        write_file(out / "trace.csv", os.str());
    }
    write_file(out / "report.csv",
               report_csv(result.report, result.max_round_delta, result.round_delta_bound));
    if (scenario.retain_matrices &&
        scenario.rule.kind != WeightRule::Kind::MacroRound) {
        // re-run with retention to dump the per-round matrices
        Scenario with_matrices = scenario;
        NetworkModel model = with_matrices.model;
        model.seed = with_matrices.seed;
        const ExecutionTrace trace = run_delayed(
            CommPattern{model}, with_matrices.rule, initial_values(with_matrices),
            scenario_schedule(with_matrices),
            static_cast<int>(result.report.rounds_run), {.retain_matrices = true});
        for (std::size_t k = 0; k < trace.matrices.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "round_%04zu.csv", k + 1);
            write_file(out / "matrices" / name, to_csv(trace.matrices[k]));
        }
    }
    std::cout << "wrote " << (out / "report.csv").string() << "\n";
    const bool ok = !result.report.solvable ||
                    (result.report.bound_satisfied && result.round_delta_ok);
    return ok ? 0 : 1;
}

std::vector<double> parse_axis_values(const std::string& text) {
    std::vector<double> values;
    // "a:b" or "a:b:step" inclusive ranges, else comma list
    if (text.find(':') != std::string::npos) {
        double a = 0, b = 0, step = 1;
        std::istringstream is(text);
        char c1 = 0, c2 = 0;
        is >> a >> c1 >> b;
        if (is && is.peek() == ':') is >> c2 >> step;
        if (c1 != ':' || step <= 0) throw ConfigError("bad axis range: " + text);
        for (double v = a; v <= b + 1e-12; v += step) values.push_back(v);
        return values;
    }
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad axis value: '" + tok + "'");
        }
    }
    return values;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& axis_specs,
              int workers, const std::string& out_file,
              const std::optional<std::uint64_t>& seed) {
    std::string base = read_file(config_path);
    {
        Scenario probe = scenario_from_json(base);
        resolve_seed(probe, seed);
        base = with_seed(base, probe.seed);
    }
    std::vector<SweepAxis> axes;
    for (const std::string& spec : axis_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ConfigError("axis must look like path=v1,v2 or path=a:b, got: " + spec);
        axes.push_back({spec.substr(0, eq), parse_axis_values(spec.substr(eq + 1))});
    }
    const auto rows = run_sweep(base, axes, workers);

    std::ostringstream os;
    for (const auto& axis : axes) os << axis.path << ',';
    os << "observed_round,theorem_bound,bound_satisfied,delta_final\n";
    bool all_ok = true;
    for (const auto& row : rows) {
        for (const auto& [path, value] : row.params) os << format_double(value) << ',';
        if (row.report.observed_round) os << *row.report.observed_round;
        os << ',' << row.report.theorem_bound << ',' << bool_str(row.report.bound_satisfied)
           << ',' << format_double(row.report.delta_final) << '\n';
        all_ok = all_ok && (!row.report.solvable || row.report.bound_satisfied);
    }
    if (out_file.empty())
        std::cout << os.str();
    else
        write_file(out_file, os.str());
    std::cout << "cells: " << rows.size() << ", all bounds satisfied: " << bool_str(all_ok)
              << "\n";
    return all_ok ? 0 : 1;
}

int cmd_check_model(const std::string& graphs_path, std::optional<int> k_nonsplit,
                    const std::string& witness_dot) {
    const std::vector<CommGraph> graphs = read_edge_lists(read_file(graphs_path));
    std::cout << "graphs: " << graphs.size() << ", n=" << graphs.front().node_count()
              << "\n";
    const SolvabilityVerdict verdict = decide_solvability(graphs);
    if (verdict.coordinated) {
        std::cout << "verdict: coordinated model -- approximate consensus solvable\n";
    } else {
        std::cout << "verdict: NOT coordinated -- approximate consensus unsolvable "
                     "(a non-rooted communication graph is admissible)\n";
        if (!witness_dot.empty()) {
            write_file(witness_dot, to_dot(verdict.witness->graph()));
            std::cout << "witness written to " << witness_dot << "\n";
        }
    }
    if (k_nonsplit) {
        const bool kn = is_k_nonsplit(graphs, *k_nonsplit);
        std::cout << "k-nonsplit (K=" << *k_nonsplit << "): " << bool_str(kn) << "\n";
    }
    return verdict.coordinated ? 0 : 1;
}

int cmd_butterfly(int m, double epsilon, const std::string& out_file) {
    const ButterflyReport rep = butterfly_experiment(m, epsilon);
    std::ostringstream os;
    os << "butterfly m=" << m << " (n=" << 2 * m << "), epsilon "
       << format_double(epsilon) << "\n"
       << "perron max error vs closed form: " << format_double(rep.perron_max_err) << "\n"
       << "phi of the half split: " << format_double(rep.phi_half_split)
       << " (closed form " << format_double(rep.phi_closed_form) << ")\n"
       << "pi_min: " << format_double(rep.pi_min) << "\n"
       << "second eigenvalue modulus: " << format_double(rep.second_modulus)
       << " (spectral gap " << format_double(rep.spectral_gap) << ")\n"
       << "rounds to delta(W^k) <= epsilon: " << rep.rounds_to_eps << "\n";
    std::cout << os.str();
    if (!out_file.empty()) write_file(out_file, os.str());
    return 0;
}

int cmd_export_dot(const std::string& config_path, int rounds, const std::string& out_dir,
                   const std::string& format, const std::optional<std::uint64_t>& seed) {
    Scenario scenario = scenario_from_json(read_file(config_path));
    resolve_seed(scenario, seed);
    NetworkModel model = scenario.model;
    model.seed = scenario.seed;
    const CommPattern pattern{model};
    const fs::path out(out_dir);
    if (format == "edges") {
        std::vector<CommGraph> graphs;
        for (int k = 1; k <= rounds; ++k) graphs.push_back(pattern.at(k));
        write_file(out / "pattern.edges", write_edge_lists(graphs));
        std::cout << "wrote " << (out / "pattern.edges").string() << "\n";
    } else {
        for (int k = 1; k <= rounds; ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "round_%04d.dot", k);
            write_file(out / name, to_dot(pattern.at(k).graph()));
        }
        std::cout << "wrote " << rounds << " dot files to " << out.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Averaging-based approximate consensus simulator over dynamic graphs"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", out_file, graphs_path, witness_dot;
    std::string format = "dot";
    std::optional<std::uint64_t> seed;
    std::optional<long long> cap;
    std::optional<int> k_nonsplit;
    bool retain = false, full_trace = false;
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    int rounds = 10, m = 4;
    double epsilon = 1e-3;

    auto* run = app.add_subcommand("run", "Run one scenario and write its reports");
    run->add_option("--config", config_path, "Scenario JSON file")->required();
    run->add_option("--seed", seed, "Seed override");
    run->add_option("--out-dir", out_dir, "Output directory");
    run->add_option("--cap", cap, "Round cap override");
    run->add_flag("--retain-matrices", retain, "Dump per-round weight matrices");
    run->add_flag("--full-trace", full_trace, "Write the per-process trace CSV");

    auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep");
    sweep->add_option("--config", config_path, "Base scenario JSON file")->required();
    std::vector<std::string> axis_specs;
    sweep->add_option("--axis", axis_specs, "Axis: path=v1,v2,... or path=a:b[:step]")
        ->required();
    sweep->add_option("--workers", workers, "Worker threads");
    sweep->add_option("--out", out_file, "Write the merged CSV here (default stdout)");
    sweep->add_option("--seed", seed, "Seed fallback for the base config");

    auto* check = app.add_subcommand("check-model", "Decide solvability of a graph set");
    check->add_option("--graphs", graphs_path, "Edge-list file, one graph per record")
        ->required();
    check->add_option("--k-nonsplit", k_nonsplit, "Also check the K-nonsplit property");
    check->add_option("--witness-dot", witness_dot, "Write a non-rooted witness as DOT");

    auto* bf = app.add_subcommand("butterfly", "Slow-mixing lower-bound experiment");
    bf->add_option("--m", m, "Butterfly half size (3..12)")->required();
    bf->add_option("--epsilon", epsilon, "Precision target");
    bf->add_option("--out", out_file, "Also write the report to this file");

    auto* dot = app.add_subcommand("export-dot", "Export a pattern's round graphs");
    dot->add_option("--config", config_path, "Scenario JSON file (model and seed)")
        ->required();
    dot->add_option("--rounds", rounds, "Number of rounds to export");
    dot->add_option("--out-dir", out_dir, "Output directory");
    dot->add_option("--format", format, "dot or edges")
        ->check(CLI::IsMember({"dot", "edges"}));
    dot->add_option("--seed", seed, "Seed override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seed, out_dir, cap, retain, full_trace);
        if (sweep->parsed()) return cmd_sweep(config_path, axis_specs, workers, out_file, seed);
        if (check->parsed()) return cmd_check_model(graphs_path, k_nonsplit, witness_dot);
        if (bf->parsed()) return cmd_butterfly(m, epsilon, out_file);
        if (dot->parsed()) return cmd_export_dot(config_path, rounds, out_dir, format, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
