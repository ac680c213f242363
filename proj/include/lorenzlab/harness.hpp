// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/config.hpp"
#include "lorenzlab/io.hpp"
#include "lorenzlab/measure.hpp"
#include "lorenzlab/parallel.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lorenzlab {

/// Source revision the library was built from (git describe, or "unknown").
std::string_view build_id();

/// Per-trial tables, a summary computed from them alone, and the warnings
/// raised while running.
struct ExperimentReport {
    ExperimentConfig config;
    std::vector<io::Table> tables;
    nlohmann::json summary;
    std::vector<std::string> warnings;

    const io::Table& table(std::string_view name) const;

    /// Config echo, params hash, build id, table names, summary and
    /// warnings. The timestamp and worker count are the only fields that
    /// vary between identical runs.
    nlohmann::json to_json() const;
};

/// Runs the configured experiment in memory. Validation is the caller's job.
ExperimentReport execute(const ExperimentConfig& config, Exec exec = Exec::parallel);

/// The summary statistics of an experiment, from its tables only.
nlohmann::json summarize(const ExperimentConfig& config, const std::vector<io::Table>& tables);

/// Writes every table as <name>.csv, then summary.json, each atomically.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// Validates, checks the step budget, executes and writes to config.output.
ExperimentReport run(const ExperimentConfig& config, Exec exec = Exec::parallel);

struct Resummary {
    nlohmann::json stored;
    nlohmann::json recomputed;
    bool matches = false;
};

/// Recomputes the summary of a written report from its CSV tables.
Resummary resummarize(const std::filesystem::path& dir);

/// Builds the configured measure and saves it to config.measure.snapshot.
EmpiricalMeasure snapshot_measure(const ExperimentConfig& config, Exec exec = Exec::parallel);

/// The measure an experiment uses: the snapshot when it exists and matches
/// the config, otherwise a fresh build.
EmpiricalMeasure obtain_measure(const ExperimentConfig& config, Exec exec, std::vector<std::string>& warnings);

} // namespace lorenzlab
