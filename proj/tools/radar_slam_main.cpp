#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radar_slam/errors.hpp"
#include "radar_slam/log_io.hpp"
#include "radar_slam/metrics.hpp"
#include "radar_slam/scenario.hpp"
#include "radar_slam/slam.hpp"

namespace fs = std::filesystem;
using namespace radar_slam;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

int cmd_run(const std::string& scenario_path, std::uint64_t seed, const std::string& out_dir,
            const std::vector<int>& snapshot_steps) {
    const Scenario scenario = load_scenario(scenario_path);
    std::vector<FrameTruth> frames;
    const RunResult result = run_scenario(scenario, seed, &frames);

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "steps.tsv", serialize_step_logs(result.logs));

    for (int k : snapshot_steps) {
        const StepLog* log = nullptr;
        const FrameTruth* frame = nullptr;
        for (const StepLog& l : result.logs) {
            if (l.k == k) log = &l;
        }
        for (const FrameTruth& f : frames) {
            if (f.k == k) frame = &f;
        }
        if (log == nullptr || frame == nullptr) {
            std::cerr << "snapshot step " << k << " was not reached\n";
            continue;
        }
        const Snapshot snap = make_snapshot(*log, *frame, scenario.scene);
        write_file(fs::path(out_dir) / ("snapshot_" + std::to_string(k) + ".tsv"),
                   serialize_snapshot(snap));
    }

    if (result.aborted) {
        std::cerr << "numerical-state abort at step " << result.abort_step << ": "
                  << result.abort_reason << '\n';
        return 2;
    }
    std::cout << "run complete: " << result.logs.size() << " steps, "
              << result.final_state.landmark_count() << " landmarks registered\n";
    return 0;
}

int cmd_montecarlo(const std::string& scenario_path, int runs, const std::string& out_dir) {
    const Scenario scenario = load_scenario(scenario_path);
    const MonteCarloResult mc = monte_carlo(scenario, runs);

    const std::string table = format_metrics_table(
        mc.aggregate, fs::path(scenario_path).stem().string());
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "metrics.tsv", table);
    std::cout << table;
    if (mc.aborted_runs > 0) {
        std::cerr << mc.aborted_runs << " of " << runs
                  << " runs aborted on numerical-state errors and were excluded\n";
        return 2;
    }
    return 0;
}

int cmd_validate(const std::string& scenario_path) {
    load_scenario(scenario_path);
    std::cout << "scenario ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radar EKF-SLAM workbench: simulated car-park runs, landmark "
                 "lifecycle management and Monte Carlo evaluation"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int runs = 100;
    std::vector<int> snapshot_steps;

    CLI::App* run = app.add_subcommand("run", "Simulate one seeded run and write step logs");
    run->add_option("--scenario", scenario_path, "Scenario file")->required();
    run->add_option("--seed", seed, "RNG seed");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--snapshots", snapshot_steps, "Steps to dump snapshot files for");

    CLI::App* mc = app.add_subcommand("montecarlo", "Aggregate metrics over seeded runs");
    mc->add_option("--scenario", scenario_path, "Scenario file")->required();
    mc->add_option("--runs", runs, "Number of runs");
    mc->add_option("--out", out_dir, "Output directory");

    CLI::App* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
    validate->add_option("--scenario", scenario_path, "Scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(scenario_path, seed, out_dir, snapshot_steps);
        }
        if (mc->parsed()) {
            return cmd_montecarlo(scenario_path, runs, out_dir);
        }
        if (validate->parsed()) {
            return cmd_validate(scenario_path);
        }
    } catch (const ParseError& err) {
        std::cerr << "parse error: " << err.what() << '\n';
        return 1;
    } catch (const ValidationError& err) {
        std::cerr << "validation error: " << err.what() << '\n';
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 3;
    }
    return 0;
}
