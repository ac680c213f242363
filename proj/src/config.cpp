// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/config.hpp"

#include "lorenzlab/errors.hpp"
#include "lorenzlab/io.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace lorenzlab {

using nlohmann::json;

std::string_view to_string(Experiment e)
{
    switch (e) {
    case Experiment::sbc: return "sbc";
    case Experiment::evt: return "evt";
    case Experiment::repp: return "repp";
    case Experiment::d3: return "d3";
    case Experiment::dprime: return "dprime";
    case Experiment::flow_evt: return "flow-evt";
    case Experiment::measure: return "measure";
    case Experiment::corr: return "corr";
    }
    return "?";
}

Experiment parse_experiment(std::string_view name)
{
    for (auto e : {Experiment::sbc, Experiment::evt, Experiment::repp, Experiment::d3, Experiment::dprime,
                   Experiment::flow_evt, Experiment::measure, Experiment::corr}) {
        if (name == to_string(e)) return e;
    }
    throw ValidationError("unknown experiment '" + std::string(name) +
                          "' (expected sbc, evt, repp, d3, dprime, flow-evt, measure or corr)");
}

namespace {

std::string_view to_string(CenterSpec::Mode m)
{
    switch (m) {
    case CenterSpec::Mode::point: return "point";
    case CenterSpec::Mode::random_generic: return "random-generic";
    case CenterSpec::Mode::periodic: return "periodic";
    }
    return "?";
}

/// Reads an object's keys against an allowlist, with dotted paths in errors.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) throw ValidationError(where() + "must be an object");
    }

    /// Call after every get(); rejects keys that were never asked for.
    void finish() const
    {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ValidationError("unknown key '" + key_path(key) + "'");
        }
    }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void get(const std::string& key, double& out)
    {
        if (!has(key)) return;
        out = to_double(j_.at(key), key);
    }

    void get(const std::string& key, bool& out)
    {
        if (!has(key)) return;
        if (!j_.at(key).is_boolean()) throw ValidationError("'" + key_path(key) + "' must be true or false");
        out = j_.at(key).get<bool>();
    }

    void get(const std::string& key, std::string& out)
    {
        if (!has(key)) return;
        if (!j_.at(key).is_string()) throw ValidationError("'" + key_path(key) + "' must be a string");
        out = j_.at(key).get<std::string>();
    }

    template <class T>
        requires std::is_integral_v<T>
    void get(const std::string& key, T& out)
    {
        if (!has(key)) return;
        out = static_cast<T>(to_count(j_.at(key), key));
    }

    void get(const std::string& key, std::vector<double>& out)
    {
        if (!has(key)) return;
        out.clear();
        for (const auto& v : array(key)) out.push_back(to_double(v, key));
    }

    void get(const std::string& key, std::vector<std::size_t>& out)
    {
        if (!has(key)) return;
        out.clear();
        for (const auto& v : array(key)) out.push_back(static_cast<std::size_t>(to_count(v, key)));
    }

private:
    std::string where() const { return path_.empty() ? "config " : "'" + path_ + "' "; }

    const json& array(const std::string& key)
    {
        const auto& a = j_.at(key);
        if (!a.is_array()) throw ValidationError("'" + key_path(key) + "' must be an array");
        return a;
    }

    double to_double(const json& v, const std::string& key) const
    {
        if (!v.is_number()) throw ValidationError("'" + key_path(key) + "' must be a number");
        return v.get<double>();
    }

    /// Non-negative integers; 1e7 style literals are accepted when integral.
    std::uint64_t to_count(const json& v, const std::string& key) const
    {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0.0 && d < 0x1.0p64 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
        }
        throw ValidationError("'" + key_path(key) + "' must be a non-negative integer");
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

ReppWindow parse_window(const json& j)
{
    if (!j.is_array()) throw ValidationError("'repp.windows' entries must be arrays of [a, b] intervals");
    ReppWindow w;
    for (const auto& iv : j) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
            throw ValidationError("'repp.windows' intervals must be [a, b] pairs");
        }
        w.intervals.emplace_back(iv[0].get<double>(), iv[1].get<double>());
    }
    return w;
}

} // namespace

ExperimentConfig parse_config(const json& j)
{
    ExperimentConfig c;
    Reader r(j, "");

    if (!r.has("experiment")) throw ValidationError("missing key 'experiment'");
    std::string s;
    r.get("experiment", s);
    c.experiment = parse_experiment(s);
    if (r.has("system")) {
        r.get("system", s);
        c.system = parse_map_kind(s);
    }
    if (!r.has("seed")) throw ValidationError("missing key 'seed' (the master seed is mandatory)");
    r.get("seed", c.seed);
    r.get("output", c.output);
    r.get("n", c.n);
    r.get("trials", c.trials);
    r.get("ensemble", c.ensemble);
    r.get("burn_in", c.burn_in);
    if (r.has("shape")) {
        r.get("shape", s);
        c.shape = parse_shape(s);
    }
    r.get("v_grid", c.v_grid);
    r.get("k_grid", c.k_grid);
    r.get("t_grid", c.t_grid);
    r.get("n_grid", c.n_grid);
    r.get("gamma1", c.gamma1);
    r.get("C", c.C);
    r.get("budget", c.budget);

    if (r.has("params")) {
        Reader p(r.raw("params"), "params");
        auto& m = c.params;
        p.get("lambda1", m.lambda1);
        p.get("lambda2", m.lambda2);
        p.get("lambda3", m.lambda3);
        p.get("theta", m.theta);
        p.get("b0", m.b0);
        p.get("b1", m.b1);
        p.get("g_kappa", m.g_kappa);
        p.get("g_c", m.g_c);
        p.get("tau0", m.tau0);
        p.finish();
    }
    if (r.has("center")) {
        Reader p(r.raw("center"), "center");
        auto& cs = c.center;
        std::string mode = "random-generic";
        p.get("mode", mode);
        if (mode == "point") cs.mode = CenterSpec::Mode::point;
        else if (mode == "random-generic") cs.mode = CenterSpec::Mode::random_generic;
        else if (mode == "periodic") cs.mode = CenterSpec::Mode::periodic;
        else throw ValidationError("'center.mode' must be point, random-generic or periodic");
        p.get("x", cs.point.x);
        p.get("y", cs.point.y);
        p.get("seed", cs.seed);
        p.get("check_radius", cs.check_radius);
        p.get("period", cs.period);
        p.get("x_guess", cs.x_guess);
        p.finish();
    }
    if (r.has("measure")) {
        Reader p(r.raw("measure"), "measure");
        p.get("samples", c.measure.samples);
        p.get("members", c.measure.members);
        p.get("cell_exponent", c.measure.cell_exponent);
        p.get("snapshot", c.measure.snapshot);
        p.finish();
    }
    if (r.has("evt")) {
        Reader p(r.raw("evt"), "evt");
        p.get("mode", c.evt.mode);
        p.get("iid_control", c.evt.iid_control);
        p.finish();
    }
    if (r.has("record")) {
        Reader p(r.raw("record"), "record");
        p.get("length", c.record.length);
        p.get("members", c.record.members);
        p.finish();
    }
    if (r.has("d3")) {
        Reader p(r.raw("d3"), "d3");
        p.get("l", c.d3_l);
        p.finish();
    }
    if (r.has("repp")) {
        Reader p(r.raw("repp"), "repp");
        if (p.has("windows")) {
            const auto& w = p.raw("windows");
            if (!w.is_array()) throw ValidationError("'repp.windows' must be an array");
            c.repp.windows.clear();
            for (const auto& x : w) c.repp.windows.push_back(parse_window(x));
        }
        p.get("max_trials", c.repp.max_trials);
        p.get("control_trials", c.repp.control_trials);
        p.finish();
    }
    if (r.has("flow")) {
        Reader p(r.raw("flow"), "flow");
        p.get("roof", c.flow.roof);
        p.get("height", c.flow.height);
        p.get("return_length", c.flow.return_length);
        p.get("zero_start_height", c.flow.zero_start_height);
        p.get("epsilon", c.flow.epsilon);
        p.finish();
    }
    if (r.has("corr")) {
        Reader p(r.raw("corr"), "corr");
        if (p.has("observable")) {
            p.get("observable", s);
            c.corr.observable = parse_corr_kind(s);
        }
        p.get("lags", c.corr.lags);
        p.get("length", c.corr.length);
        p.get("members", c.corr.members);
        p.get("width", c.corr.width);
        p.get("level", c.corr.level);
        p.finish();
    }
    r.finish();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    json j;
    try {
        j = json::parse(io::read_file(path));
    }
    catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return parse_config(j);
}

json ExperimentConfig::to_json() const
{
    json j;
    j["experiment"] = std::string(lorenzlab::to_string(experiment));
    j["system"] = std::string(lorenzlab::to_string(system));
    j["seed"] = seed;
    j["output"] = output;
    j["n"] = n;
    j["trials"] = trials;
    j["ensemble"] = ensemble;
    j["burn_in"] = burn_in;
    j["shape"] = std::string(lorenzlab::to_string(shape));
    j["v_grid"] = v_grid;
    j["k_grid"] = k_grid;
    j["t_grid"] = t_grid;
    j["n_grid"] = n_grid;
    j["gamma1"] = gamma1;
    j["C"] = C;
    j["budget"] = budget;
    j["params"] = {{"lambda1", params.lambda1}, {"lambda2", params.lambda2}, {"lambda3", params.lambda3},
                   {"theta", params.theta},     {"b0", params.b0},           {"b1", params.b1},
                   {"g_kappa", params.g_kappa}, {"g_c", params.g_c},         {"tau0", params.tau0}};
    j["center"] = {{"mode", std::string(to_string(center.mode))},
                   {"x", center.point.x},
                   {"y", center.point.y},
                   {"seed", center.seed},
                   {"check_radius", center.check_radius},
                   {"period", center.period},
                   {"x_guess", center.x_guess}};
    j["measure"] = {{"samples", measure.samples},
                    {"members", measure.members},
                    {"cell_exponent", measure.cell_exponent},
                    {"snapshot", measure.snapshot}};
    j["evt"] = {{"mode", evt.mode}, {"iid_control", evt.iid_control}};
    j["record"] = {{"length", record.length}, {"members", record.members}};
    j["d3"] = {{"l", d3_l}};
    json windows = json::array();
    for (const auto& w : repp.windows) {
        json iv = json::array();
        for (const auto& [a, b] : w.intervals) iv.push_back({a, b});
        windows.push_back(iv);
    }
    j["repp"] = {{"windows", windows}, {"max_trials", repp.max_trials}, {"control_trials", repp.control_trials}};
    j["flow"] = {{"roof", flow.roof},
                 {"height", flow.height},
                 {"return_length", flow.return_length},
                 {"zero_start_height", flow.zero_start_height},
                 {"epsilon", flow.epsilon}};
    j["corr"] = {{"observable", std::string(lorenzlab::to_string(corr.observable))},
                 {"lags", corr.lags},
                 {"length", corr.length},
                 {"members", corr.members},
                 {"width", corr.width},
                 {"level", corr.level}};
    return j;
}

std::vector<std::string> config_violations(const ExperimentConfig& c)
{
    std::vector<std::string> out;
    for (const auto& v : c.params.violations()) out.push_back("params: violated " + v);
    auto positive = [&](const char* name, std::size_t v) {
        if (v == 0) out.push_back(std::string(name) + " > 0");
    };
    positive("n", c.n);
    positive("trials", c.trials);
    positive("ensemble", c.ensemble);
    positive("burn_in", c.burn_in);
    positive("measure.samples", c.measure.samples);
    positive("measure.members", c.measure.members);
    positive("record.length", c.record.length);
    positive("record.members", c.record.members);
    if (c.output.empty()) out.push_back("output must name a directory");
    if (!(c.gamma1 > 0.0 && c.gamma1 <= 1.0)) out.push_back("0 < gamma1 <= 1");
    if (!(c.C > 0.0 && c.C <= 1.0)) out.push_back("0 < C <= 1");
    if (!(c.budget > 0.0)) out.push_back("budget > 0");
    if (c.v_grid.empty()) out.push_back("v_grid must not be empty");
    for (double v : c.v_grid) {
        if (!std::isfinite(v)) out.push_back("v_grid entries must be finite");
    }
    for (auto k : c.k_grid) {
        if (k == 0) out.push_back("k_grid entries > 0");
    }
    for (auto n : c.n_grid) {
        if (n == 0) out.push_back("n_grid entries > 0");
    }
    if (c.measure.cell_exponent < 1 || c.measure.cell_exponent > 12) out.push_back("1 <= measure.cell_exponent <= 12");
    const auto& cs = c.center;
    if (cs.mode == CenterSpec::Mode::point && !(std::abs(cs.point.x) <= 0.5 && std::abs(cs.point.y) <= 0.5)) {
        out.push_back("center point inside [-1/2, 1/2]^2");
    }
    if (cs.mode == CenterSpec::Mode::periodic) {
        if (c.system != MapKind::lorenz) out.push_back("periodic centers need system = lorenz");
        if (cs.period < 1 || cs.period > 12) out.push_back("1 <= center.period <= 12");
    }
    if (cs.mode == CenterSpec::Mode::random_generic && !(cs.check_radius > 0.0)) out.push_back("center.check_radius > 0");

    switch (c.experiment) {
    case Experiment::sbc:
        if (c.n < 1000) out.push_back("sbc: n >= 1000");
        break;
    case Experiment::evt:
        if (c.evt.mode != "independent_starts" && c.evt.mode != "blocks" && c.evt.mode != "both") {
            out.push_back("evt.mode is independent_starts, blocks or both");
        }
        if (c.trials < 1000) out.push_back("evt: trials >= 1000 (Gumbel KS sample)");
        break;
    case Experiment::dprime:
        if (c.k_grid.empty()) out.push_back("dprime: k_grid must not be empty");
        if (c.n_grid.empty()) out.push_back("dprime: n_grid must not be empty");
        break;
    case Experiment::d3:
        if (c.d3_l > c.n) out.push_back("d3: l <= n");
        for (auto t : c.t_grid) {
            if (t + std::max<std::size_t>(c.d3_l, 1) >= c.record.length) out.push_back("d3: t + l < record.length");
        }
        break;
    case Experiment::repp:
        if (c.repp.windows.empty()) out.push_back("repp: at least one window");
        for (const auto& w : c.repp.windows) {
            for (const auto& [a, b] : w.intervals) {
                if (!(a >= 0.0 && b > a)) out.push_back("repp: windows need 0 <= a < b");
            }
        }
        break;
    case Experiment::flow_evt:
        if (c.flow.roof != "model" && c.flow.roof != "unit") out.push_back("flow.roof is model or unit");
        if (!(c.flow.height >= 0.0 && c.flow.height < 1.0)) out.push_back("0 <= flow.height < 1");
        if (c.trials < 1000) out.push_back("flow-evt: trials >= 1000");
        if (c.flow.return_length == 0) out.push_back("flow.return_length > 0");
        if (c.flow.epsilon.empty()) out.push_back("flow.epsilon must not be empty");
        if (c.center.mode == CenterSpec::Mode::point && c.flow.roof == "model" && c.center.point.x == 0.0) {
            out.push_back("flow: center x != 0 (roof is infinite on the singular line)");
        }
        break;
    case Experiment::corr:
        if (c.corr.lags > 200) out.push_back("corr: lags <= 200");
        if (c.corr.length < 10000000) out.push_back("corr: length >= 1e7");
        if (c.corr.members < 2) out.push_back("corr: members >= 2");
        if (!(c.corr.width > 0.0)) out.push_back("corr: width > 0");
        break;
    case Experiment::measure: break;
    }
    return out;
}

void validate(const ExperimentConfig& c)
{
    const auto bad = config_violations(c);
    if (bad.empty()) return;
    std::ostringstream os;
    os << "invalid config: violated";
    for (std::size_t i = 0; i < bad.size(); ++i) os << (i ? "; " : " ") << bad[i];
    throw ValidationError(os.str());
}

namespace {

bool needs_measure(const ExperimentConfig& c)
{
    if (c.experiment == Experiment::corr) {
        return c.corr.observable == CorrObservable::Kind::bump && c.center.mode == CenterSpec::Mode::random_generic;
    }
    return true;
}

} // namespace

double planned_steps(const ExperimentConfig& c)
{
    double steps = needs_measure(c) ? static_cast<double>(c.measure.samples) : 0.0;
    const double n = static_cast<double>(c.n);
    switch (c.experiment) {
    case Experiment::sbc: steps += static_cast<double>(c.ensemble) * n; break;
    case Experiment::evt: {
        const double modes = c.evt.mode == "both" ? 2.0 : 1.0;
        steps += static_cast<double>(c.trials) * n * modes * (c.evt.iid_control ? 2.0 : 1.0);
        break;
    }
    case Experiment::repp:
    case Experiment::d3:
    case Experiment::dprime:
        steps += static_cast<double>(c.record.length) * static_cast<double>(c.record.members);
        break;
    case Experiment::flow_evt:
        steps += static_cast<double>(c.trials) * n + static_cast<double>(c.flow.return_length);
        break;
    case Experiment::corr: steps += 2.0 * static_cast<double>(c.corr.length); break;
    case Experiment::measure: break;
    }
    return steps;
}

} // namespace lorenzlab
