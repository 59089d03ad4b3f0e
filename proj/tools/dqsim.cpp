// dqsim: scenario-driven simulator for synchronous-frame current estimation
// under combined position- and current-sensor errors.
//
// Exit codes: 0 success, 1 invalid config/usage, 2 numerical divergence,
// 3 I/O failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dqsim/emit.hpp"
#include "dqsim/errors.hpp"
#include "dqsim/estimation.hpp"
#include "dqsim/runner.hpp"
#include "dqsim/scenario.hpp"

namespace {

namespace fs = std::filesystem;

int run_one(const fs::path& scenario_path, const fs::path& out_dir,
            const dqsim::EmitFormats& formats, bool quiet) {
    const dqsim::Scenario s = dqsim::load_scenario(scenario_path);
    const dqsim::RunResult result = dqsim::run(s);
    const auto written = dqsim::emit(result, out_dir, formats);
    if (!quiet) {
        std::printf("%s: %zu samples, analysis window %zu samples\n",
                    scenario_path.filename().string().c_str(), result.t.size(),
                    result.analysis_length);
        for (const auto& path : written) {
            std::printf("  wrote %s\n", path.string().c_str());
        }
    }
    return 0;
}

int cmd_run(const std::string& scenario, const std::string& out, const std::string& formats) {
    return run_one(scenario, out, dqsim::parse_formats(formats), false);
}

int cmd_sweep(const std::string& dir, const std::string& out, const std::string& formats) {
    const dqsim::EmitFormats fmt = dqsim::parse_formats(formats);
    std::vector<fs::path> scenarios;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.path().extension() == ".json") scenarios.push_back(entry.path());
    }
    if (ec) {
        throw dqsim::IoError("cannot read scenario directory " + dir + ": " + ec.message());
    }
    if (scenarios.empty()) {
        throw dqsim::ConfigError("no .json scenarios found in " + dir);
    }
    std::sort(scenarios.begin(), scenarios.end());

    // Scenarios are independent and write to disjoint directories, so they
    // can run concurrently; output is printed afterwards in a fixed order.
    struct Outcome {
        fs::path scenario;
        std::string error;
    };
    std::vector<std::future<Outcome>> futures;
    for (const auto& path : scenarios) {
        futures.push_back(std::async(std::launch::async, [&, path]() -> Outcome {
            try {
                run_one(path, fs::path(out) / path.stem(), fmt, true);
                return {path, ""};
            } catch (const std::exception& e) {
                return {path, e.what()};
            }
        }));
    }
    int failures = 0;
    for (auto& f : futures) {
        const Outcome outcome = f.get();
        if (outcome.error.empty()) {
            std::printf("ok   %s\n", outcome.scenario.filename().string().c_str());
        } else {
            std::printf("FAIL %s: %s\n", outcome.scenario.filename().string().c_str(),
                        outcome.error.c_str());
            ++failures;
        }
    }
    if (failures > 0) {
        throw dqsim::ConfigError(std::to_string(failures) + " scenario(s) failed");
    }
    return 0;
}

int cmd_validate(std::uint64_t seed, int trials) {
    const dqsim::ValidationReport report = dqsim::validate_analytic(seed, trials);
    std::fputs(dqsim::format_report(report).c_str(), stdout);
    return 0;
}

int cmd_orders(const std::string& scenario_path) {
    const dqsim::Scenario s = dqsim::load_scenario(scenario_path);
    const auto lines =
        dqsim::predicted_orders(s.position_error, s.current_error, s.motor, s.command_dq);
    std::printf("%-10s %-22s %s\n", "order", "amplitude_ampere", "channel");
    for (const auto& line : lines) {
        std::printf("%-10g %-22.17g %c\n", line.order, line.amplitude_ampere, line.channel);
    }
    if (lines.empty()) {
        std::printf("(no predicted lines: error-free scenario)\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PMSM sensing-error simulator: synchronous-frame current estimation "
                 "under position and current sensor errors"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", formats = "csv,json";
    auto* run_cmd = app.add_subcommand("run", "Run one scenario and write results");
    run_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (default: out)");
    run_cmd->add_option("--formats", formats, "Comma list of csv,svg,json (default: csv,json)");

    std::string sweep_dir, sweep_out = "results";
    auto* sweep_cmd = app.add_subcommand("sweep", "Run every scenario JSON in a directory");
    sweep_cmd->add_option("scenarios-dir", sweep_dir, "Directory of scenario JSONs")->required();
    sweep_cmd->add_option("--out", sweep_out,
                          "Parent output directory; one subdirectory per scenario");
    sweep_cmd->add_option("--formats", formats, "Comma list of csv,svg,json");

    std::uint64_t seed = 1;
    int trials = 1000;
    auto* validate_cmd = app.add_subcommand(
        "validate", "Randomized equivalence sweep: closed form vs brute-force chain");
    validate_cmd->add_option("--trials", trials, "Number of random trials (default: 1000)");
    validate_cmd->add_option("--seed", seed, "RNG seed (default: 1)");

    std::string orders_path;
    auto* orders_cmd =
        app.add_subcommand("orders", "Print predicted spectral lines without simulating");
    orders_cmd->add_option("scenario", orders_path, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) return cmd_run(scenario_path, out_dir, formats);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_dir, sweep_out, formats);
        if (validate_cmd->parsed()) return cmd_validate(seed, trials);
        if (orders_cmd->parsed()) return cmd_orders(orders_path);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const dqsim::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const dqsim::DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const dqsim::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
