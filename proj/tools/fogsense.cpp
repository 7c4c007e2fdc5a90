// fogsense: scenario runner and trace tooling.
//
//   fogsense run --scenario <path> [--seed <u64>] [--until <ms>] [--trace <path>] [--param k=v]...
//   fogsense validate --scenario <path>
//   fogsense summarize --trace <path>
//
// Exit codes: 0 success, 1 invalid scenario or unreadable input,
// 2 runtime invariant violation.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fogsense/scenario/scenario.hpp"
#include "fogsense/scenario/simulation.hpp"
#include "fogsense/scenario/trace_io.hpp"

namespace fs = fogsense::scenario;

namespace {

void print_diagnostics(const std::string& path, const std::vector<fs::Diagnostic>& diags) {
    for (const auto& d : diags) {
        std::cerr << path << ": " << d.str() << '\n';
    }
}

int cmd_run(const std::string& path, const fs::Overrides& overrides, const std::string& trace_path) {
    const auto loaded = fs::load_scenario_file(path, overrides);
    if (!loaded.ok()) {
        print_diagnostics(path, loaded.diagnostics);
        return 1;
    }
    std::vector<fogsense::sim::TraceRecord> trace;
    try {
        fs::Simulation sim(*loaded.scenario);
        trace = sim.run();
    } catch (const fs::InvariantViolation& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    if (!trace_path.empty()) {
        std::ofstream out(trace_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write trace file " << trace_path << '\n';
            return 1;
        }
        fs::write_trace(out, trace);
    }
    auto report = fs::summarize(trace);
    nlohmann::ordered_json head;
    head["scenario"] = loaded.scenario->name;
    head["seed"] = loaded.scenario->seed;
    head["stop_time"] = loaded.scenario->stop_time;
    head.update(report);
    std::cout << head.dump(2) << '\n';
    return 0;
}

int cmd_validate(const std::string& path) {
    const auto loaded = fs::load_scenario_file(path);
    if (!loaded.ok()) {
        print_diagnostics(path, loaded.diagnostics);
        std::cout << loaded.diagnostics.size() << " problem(s)\n";
        return 1;
    }
    std::cout << "OK\n";
    return 0;
}

int cmd_summarize(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open trace file " << path << '\n';
        return 1;
    }
    try {
        std::cout << fs::summarize(fs::read_trace(in)).dump(2) << '\n';
    } catch (const fs::TraceFormatError& e) {
        std::cerr << path << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic fog/sensor social-sensing simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string trace_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> until;
    std::vector<std::string> params;

    auto* run = app.add_subcommand("run", "Run a scenario and print a summary");
    run->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--until", until, "Override the stop time (ms)");
    run->add_option("--trace", trace_path, "Write the JSONL trace here");
    run->add_option("--param", params, "Override a parameter, k=v (repeatable)");

    auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();

    std::string summarize_path;
    auto* summarize = app.add_subcommand("summarize", "Report metrics from a trace file");
    summarize->add_option("--trace", summarize_path, "JSONL trace file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*run) {
        fs::Overrides o;
        o.seed = seed;
        o.until = until;
        for (const auto& p : params) {
            const auto eq = p.find('=');
            if (eq == std::string::npos || eq == 0) {
                std::cerr << "--param expects k=v, got '" << p << "'\n";
                return 1;
            }
            o.params.emplace_back(p.substr(0, eq), p.substr(eq + 1));
        }
        return cmd_run(scenario_path, o, trace_path);
    }
    if (*validate) {
        return cmd_validate(scenario_path);
    }
    return cmd_summarize(summarize_path);
}
