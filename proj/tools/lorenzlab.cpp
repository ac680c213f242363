// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: run, validate, report and snapshot-measure.
// LORENZLAB_WORKERS sets the worker count; --seed overrides the master seed.

#include "lorenzlab/errors.hpp"
#include "lorenzlab/harness.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace lorenzlab;

enum Exit : int { ok = 0, failure = 1, invalid = 2, resolution = 3, budget = 4, mismatch = 5 };

ExperimentConfig load(const std::string& path, const std::optional<std::uint64_t>& seed,
                      const std::optional<std::string>& output)
{
    auto c = load_config(path);
    if (seed) c.seed = *seed;
    if (output) c.output = *output;
    return c;
}

void print_warnings(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"lorenzlab: extreme values and shrinking targets for geometric Lorenz maps"};
    app.require_subcommand(1);

    std::string config_path, dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    bool serial = false;

    auto* run_cmd = app.add_subcommand("run", "run the experiment a config describes");
    run_cmd->add_option("config", config_path, "experiment config (JSON)")->required();
    run_cmd->add_option("--seed", seed, "override the master seed");
    run_cmd->add_option("--output", output, "override the output directory");
    run_cmd->add_flag("--serial", serial, "use the serial reference kernels");

    auto* validate_cmd = app.add_subcommand("validate", "check a config without running it");
    validate_cmd->add_option("config", config_path, "experiment config (JSON)")->required();
    validate_cmd->add_option("--seed", seed, "override the master seed");

    auto* report_cmd = app.add_subcommand("report", "recompute a report's summary from its tables");
    report_cmd->add_option("dir", dir, "report directory")->required();

    auto* snap_cmd = app.add_subcommand("snapshot-measure", "build and save the configured measure");
    snap_cmd->add_option("config", config_path, "experiment config (JSON)")->required();
    snap_cmd->add_option("--seed", seed, "override the master seed");
    snap_cmd->add_flag("--serial", serial, "use the serial reference kernels");

    CLI11_PARSE(app, argc, argv);
    const Exec exec = serial ? Exec::serial : Exec::parallel;

    try {
        if (*run_cmd) {
            const auto report = run(load(config_path, seed, output), exec);
            print_warnings(report.warnings);
            std::cout << report.summary.dump(2) << "\n";
            std::cerr << "wrote " << report.tables.size() << " tables and summary.json to " << report.config.output
                      << "\n";
        }
        else if (*validate_cmd) {
            const auto c = load(config_path, seed, std::nullopt);
            validate(c);
            std::cout << "ok: " << to_string(c.experiment) << " on " << to_string(c.system) << ", planned "
                      << io::format_number(planned_steps(c)) << " map steps\n";
        }
        else if (*report_cmd) {
            const auto r = resummarize(dir);
            std::cout << r.recomputed.dump(2) << "\n";
            if (!r.matches) {
                std::cerr << "error: recomputed summary differs from the stored one\n";
                return mismatch;
            }
        }
        else if (*snap_cmd) {
            const auto c = load(config_path, seed, std::nullopt);
            const auto m = snapshot_measure(c, exec);
            std::cout << "saved " << m.size() << " samples to " << c.measure.snapshot << "\n";
        }
    }
    catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return invalid;
    }
    catch (const ResolutionError& e) {
        std::cerr << "resolution error: " << e.what() << "\n";
        return resolution;
    }
    catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return budget;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
    return ok;
}
