// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/correlation.hpp"
#include "lorenzlab/evt.hpp"
#include "lorenzlab/maps.hpp"
#include "lorenzlab/measure.hpp"
#include "lorenzlab/params.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lorenzlab {

enum class Experiment { sbc, evt, repp, d3, dprime, flow_evt, measure, corr };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

struct CenterSpec {
    enum class Mode { point, random_generic, periodic };
    Mode mode = Mode::random_generic;
    SectionPoint point{};       ///< point mode
    std::uint64_t seed = 0;     ///< random-generic; 0 uses the master seed
    double check_radius = 1e-3; ///< random-generic non-periodicity check
    int period = 2;             ///< periodic mode (lorenz)
    double x_guess = 0.1;       ///< periodic mode Newton start
};

struct MeasureSpec {
    std::size_t samples = 10000000;
    std::size_t members = 8;
    int cell_exponent = 10;
    std::string snapshot; ///< load from here when the file exists
};

struct EvtSpec {
    std::string mode = "independent_starts"; ///< independent_starts | blocks | both
    bool iid_control = false;
};

struct RecordSpec {
    std::size_t length = 100000000; ///< per member
    std::size_t members = 10;
};

struct ReppSpec {
    std::vector<ReppWindow> windows{ReppWindow{{{0.0, 1.0}}}};
    std::size_t max_trials = 0;
    std::size_t control_trials = 0; ///< synthetic Poisson control when > 0
};

struct FlowSpec {
    std::string roof = "model";  ///< model | unit
    double height = 0.5;         ///< x0 height as a fraction of h(p0)
    std::size_t return_length = 10000000;
    bool zero_start_height = false;
    std::vector<double> epsilon{0.1, 0.03, 0.01};
};

struct CorrSpec {
    CorrObservable::Kind observable = CorrObservable::Kind::x;
    std::size_t lags = 50;
    std::size_t length = 10000000;
    std::size_t members = 10;
    double width = 0.1;
    double level = 1.0;
};

/// One experiment. Every field except the master seed has a default.
struct ExperimentConfig {
    Experiment experiment = Experiment::measure;
    MapKind system = MapKind::lorenz;
    ModelParams params;
    std::uint64_t seed = 0;
    std::string output = "out";
    std::size_t n = 100000;
    std::size_t trials = 1000;
    std::size_t ensemble = 100;
    std::size_t burn_in = 1000;
    CenterSpec center;
    Shape shape = Shape::ball;
    std::vector<double> v_grid{0.0};
    std::vector<std::size_t> k_grid{2, 5, 10, 20};
    std::vector<std::size_t> t_grid;                        ///< empty: 1, 10, 100, 1000 and (log n)^5
    std::vector<std::size_t> n_grid{10000, 100000, 1000000}; ///< dprime levels
    std::size_t d3_l = 0;                                   ///< 0: n
    double gamma1 = 0.6;
    double C = 0.01;
    double budget = 1e12; ///< cap on planned map steps
    MeasureSpec measure;
    EvtSpec evt;
    RecordSpec record;
    ReppSpec repp;
    FlowSpec flow;
    CorrSpec corr;

    /// Canonical JSON of every field (defaults included).
    nlohmann::json to_json() const;
};

/// Parses a config; unknown keys, wrong types and a missing seed are
/// ValidationErrors naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One line per violated constraint; empty when the config is runnable.
std::vector<std::string> config_violations(const ExperimentConfig& config);

/// Throws ValidationError listing every violation.
void validate(const ExperimentConfig& config);

/// Planned map steps (measure construction included).
double planned_steps(const ExperimentConfig& config);

} // namespace lorenzlab
