// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/harness.hpp"

#include "lorenzlab/borel_cantelli.hpp"
#include "lorenzlab/correlation.hpp"
#include "lorenzlab/errors.hpp"
#include "lorenzlab/evt.hpp"
#include "lorenzlab/flow.hpp"
#include "lorenzlab/source.hpp"
#include "lorenzlab/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <set>

#ifndef LORENZLAB_BUILD_ID
#define LORENZLAB_BUILD_ID "unknown"
#endif

namespace lorenzlab {

namespace fs = std::filesystem;
using nlohmann::json;
using io::Table;

std::string_view build_id() { return LORENZLAB_BUILD_ID; }

const Table& ExperimentReport::table(std::string_view name) const
{
    for (const auto& t : tables) {
        if (t.name() == name) return t;
    }
    throw Error("report has no table '" + std::string(name) + "'");
}

json ExperimentReport::to_json() const
{
    json j;
    j["build"] = std::string(build_id());
    j["config"] = config.to_json();
    j["experiment"] = std::string(to_string(config.experiment));
    j["params_hash"] = to_hex(config.params.hash());
    json names = json::array();
    for (const auto& t : tables) names.push_back(t.name());
    j["tables"] = names;
    j["summary"] = summary;
    j["warnings"] = warnings;
    j["workers"] = worker_count();
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["created"] = stamp;
    return j;
}

EmpiricalMeasure obtain_measure(const ExperimentConfig& c, Exec exec, std::vector<std::string>& warnings)
{
    if (!c.measure.snapshot.empty() && fs::exists(c.measure.snapshot)) {
        auto m = EmpiricalMeasure::load(c.measure.snapshot);
        const auto& meta = m.meta();
        if (meta.system != c.system || meta.params_hash != c.params.hash() || meta.seed != c.seed ||
            meta.burn_in != c.burn_in || meta.members != c.measure.members ||
            m.cell_exponent() != c.measure.cell_exponent || m.size() > c.measure.samples) {
            throw ValidationError("measure snapshot " + c.measure.snapshot +
                                  " was built from a different system, params, seed, burn_in or size");
        }
        return m;
    }
    MeasureOptions o;
    o.members = c.measure.members;
    o.cell_exponent = c.measure.cell_exponent;
    o.exec = exec;
    auto m = build_empirical_measure(c.system, c.params, c.measure.samples, c.burn_in, c.seed, o);
    if (m.meta().truncated_members > 0) {
        warnings.push_back(std::to_string(m.meta().truncated_members) +
                           " measure members truncated on the singular line");
    }
    return m;
}

EmpiricalMeasure snapshot_measure(const ExperimentConfig& c, Exec exec)
{
    if (c.measure.snapshot.empty()) throw ValidationError("snapshot-measure needs measure.snapshot");
    validate(c);
    MeasureOptions o;
    o.members = c.measure.members;
    o.cell_exponent = c.measure.cell_exponent;
    o.exec = exec;
    auto m = build_empirical_measure(c.system, c.params, c.measure.samples, c.burn_in, c.seed, o);
    const fs::path path = c.measure.snapshot;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    m.save(tmp.string());
    fs::rename(tmp, path);
    return m;
}

namespace {

struct Ctx {
    const ExperimentConfig& c;
    Exec exec;
    std::vector<Table>& tables;
    std::vector<std::string>& warnings;

    void warn(const std::vector<std::string>& w) { warnings.insert(warnings.end(), w.begin(), w.end()); }
};

SectionPoint resolve_center(const ExperimentConfig& c, const EmpiricalMeasure* m)
{
    switch (c.center.mode) {
    case CenterSpec::Mode::point: return c.center.point;
    case CenterSpec::Mode::periodic: return find_periodic_point(c.params, c.center.period, c.center.x_guess);
    case CenterSpec::Mode::random_generic:
        if (!m) throw Error("random-generic center needs a measure");
        return generic_center(*m, c.params, c.center.seed ? c.center.seed : c.seed, c.center.check_radius, c.shape);
    }
    return {};
}

Table center_table(SectionPoint p)
{
    Table t("center", {"x", "y"});
    t.add(p.x, p.y);
    return t;
}

Table levels_table(const LevelSchedule& s)
{
    Table t("levels", {"v", "n", "u", "radius", "mass", "achieved", "bracket_lo", "bracket_hi", "in_bracket"});
    for (const auto& e : s.entries) {
        t.add(e.v, e.n, e.u, e.radius, e.mass, e.achieved, e.bracket_lo, e.bracket_hi, e.in_bracket);
    }
    return t;
}

Table scaling_table(const ScalingFit& f)
{
    Table t("scaling", {"dimension", "log_c", "r2", "radii"});
    t.add(f.dimension, f.log_c, f.estimate.r2, f.estimate.radii.size());
    return t;
}

std::vector<Level> as_levels(const LevelSchedule& s)
{
    return {s.entries.begin(), s.entries.end()};
}

/// Warns when an explicit center returns close to itself.
void check_center(Ctx& x, const Observable& obs, double r)
{
    if (x.c.center.mode != CenterSpec::Mode::point) return;
    try {
        check_non_periodic(x.c.system, x.c.params, obs, r);
    }
    catch (const PeriodicCenterError& e) {
        x.warnings.push_back(std::string("center is not generic: ") + e.what());
    }
}

void run_measure(Ctx& x)
{
    const auto& c = x.c;
    const auto m = obtain_measure(c, x.exec, x.warnings);
    const SectionPoint center = resolve_center(c, &m);
    x.tables.push_back(center_table(center));

    Table quad("quadrants", {"quadrant", "count", "mass"});
    const std::size_t S = m.cells_per_side(), h = S / 2;
    const char* names[2][2] = {{"x-y-", "x-y+"}, {"x+y-", "x+y+"}};
    for (int qx = 0; qx < 2; ++qx) {
        for (int qy = 0; qy < 2; ++qy) {
            std::uint64_t count = 0;
            for (std::size_t ix = qx * h; ix < (qx + 1) * h; ++ix) {
                for (std::size_t iy = qy * h; iy < (qy + 1) * h; ++iy) count += m.cell_count(ix, iy);
            }
            quad.add(names[qx][qy], count, static_cast<double>(count) / static_cast<double>(m.size()));
        }
    }
    x.tables.push_back(std::move(quad));

    Table radial("radial", {"radius", "count", "mass"});
    for (int k = 1; k <= 30; ++k) {
        const double r = std::ldexp(1.0, -k);
        const std::size_t count = m.count_within(center, r, c.shape);
        if (count == 0) break;
        radial.add(r, count, static_cast<double>(count) / static_cast<double>(m.size()));
    }
    x.tables.push_back(std::move(radial));
}

void run_sbc_experiment(Ctx& x)
{
    const auto& c = x.c;
    const auto m = obtain_measure(c, x.exec, x.warnings);
    const SectionPoint center = resolve_center(c, &m);
    x.tables.push_back(center_table(center));
    TargetOptions to;
    to.C = c.C;
    const auto targets = build_targets(m, center, c.shape, c.gamma1, c.n, to);
    x.warn(targets.warnings);
    const std::size_t n = targets.size();

    SbcOptions so;
    so.ensemble = c.ensemble;
    so.seed = c.seed;
    so.exec = x.exec;
    const auto rep = run_sbc(OrbitSource::dynamics(c.system, c.params, c.burn_in), targets, n, so);
    if (rep.excluded > 0) x.warnings.push_back(std::to_string(rep.excluded) + " members truncated and excluded");

    Table sbc("sbc", {"member", "checkpoint", "S_n", "E_n", "ratio", "truncated"});
    for (const auto& mem : rep.members) {
        for (std::size_t k = 0; k < rep.checkpoints.size(); ++k) {
            const double hits = k < mem.hits.size() ? static_cast<double>(mem.hits[k]) : 0.0;
            sbc.add(mem.member, rep.checkpoints[k], k < mem.hits.size() ? mem.hits[k] : 0, rep.expected[k],
                    hits / rep.expected[k], mem.truncated);
        }
    }
    x.tables.push_back(std::move(sbc));

    // Targets at the checkpoints plus the index where the side condition peaks.
    std::set<std::size_t> rows(rep.checkpoints.begin(), rep.checkpoints.end());
    std::size_t arg = 1;
    double best = -1.0;
    for (std::size_t i = 2; i <= n; ++i) {
        const double side = std::log(static_cast<double>(i)) * 2.0 * targets.radii[i - 1];
        if (side > best) {
            best = side;
            arg = i;
        }
    }
    rows.insert(arg);
    rows.insert(1);
    Table tt("targets", {"i", "radius", "mass", "E_i", "side"});
    for (auto i : rows) {
        tt.add(i, targets.radii[i - 1], targets.masses[i - 1], targets.cumulative[i - 1],
               std::log(static_cast<double>(i)) * 2.0 * targets.radii[i - 1]);
    }
    x.tables.push_back(std::move(tt));
}

void run_evt(Ctx& x)
{
    const auto& c = x.c;
    const auto m = obtain_measure(c, x.exec, x.warnings);
    const SectionPoint center = resolve_center(c, &m);
    const Observable obs{center, c.shape};
    const auto fit = fit_scaling(m, obs);
    const auto sched = levels(m, obs, c.v_grid, {c.n}, fit.dimension, 0.1);
    const auto lv = as_levels(sched);
    double r_min = lv.front().radius;
    for (const auto& l : lv) r_min = std::min(r_min, l.radius);
    check_center(x, obs, r_min);

    x.tables.push_back(center_table(center));
    x.tables.push_back(scaling_table(fit));
    x.tables.push_back(levels_table(sched));

    std::vector<std::pair<std::string, MaximaMode>> modes;
    if (c.evt.mode != "blocks") modes.emplace_back("independent_starts", MaximaMode::independent_starts);
    if (c.evt.mode != "independent_starts") modes.emplace_back("blocks", MaximaMode::blocks);
    std::vector<std::pair<std::string, OrbitSource>> sources{
        {"map", OrbitSource::dynamics(c.system, c.params, c.burn_in)}};
    if (c.evt.iid_control) sources.emplace_back("iid", OrbitSource::iid(m));

    Table maxima("maxima", {"source", "mode", "trial", "min_distance", "M_n", "truncated"});
    for (const auto& [sname, src] : sources) {
        for (const auto& [mname, mode] : modes) {
            MaximaOptions mo;
            mo.n = c.n;
            mo.trials = c.trials;
            mo.seed = c.seed;
            mo.mode = mode;
            mo.exec = x.exec;
            const auto bm = block_maxima_cdf(src, obs, lv, mo);
            for (const auto& row : bm.rows) {
                if (!row.hitting_identity) {
                    x.warnings.push_back(sname + "/" + mname + ": first-entry identity failed at v = " +
                                         io::format_number(row.v));
                }
            }
            for (std::size_t t = 0; t < bm.trials.size(); ++t) {
                const auto& tr = bm.trials[t];
                maxima.add(sname, mname, t, tr.min_distance, Observable::value_at_distance(tr.min_distance),
                           tr.truncated);
            }
        }
    }
    x.tables.push_back(std::move(maxima));
}

struct RecordSetup {
    LevelSchedule schedule;
    ExceedanceRecord record;
};

RecordSetup record_for(Ctx& x, const std::vector<double>& v_grid, const std::vector<std::size_t>& n_grid)
{
    const auto& c = x.c;
    const auto m = obtain_measure(c, x.exec, x.warnings);
    const SectionPoint center = resolve_center(c, &m);
    const Observable obs{center, c.shape};
    const auto fit = fit_scaling(m, obs);
    RecordSetup out;
    out.schedule = levels(m, obs, v_grid, n_grid, fit.dimension, 0.1);
    const auto lv = as_levels(out.schedule);
    double r_min = lv.front().radius;
    for (const auto& l : lv) r_min = std::min(r_min, l.radius);
    check_center(x, obs, r_min);
    x.tables.push_back(center_table(center));
    x.tables.push_back(scaling_table(fit));
    x.tables.push_back(levels_table(out.schedule));
    out.record = record_exceedances(OrbitSource::dynamics(c.system, c.params, c.burn_in), obs, lv, c.record.length,
                                    c.record.members, c.seed, x.exec);
    if (out.record.truncated > 0) {
        x.warnings.push_back(std::to_string(out.record.truncated) + " record members truncated");
    }
    return out;
}

void run_dprime(Ctx& x)
{
    const auto& c = x.c;
    const auto setup = record_for(x, c.v_grid, c.n_grid);
    const auto table = d_prime_stat(setup.record, c.k_grid);
    x.warn(table.warnings);
    Table t("dprime", {"v", "n", "k", "value", "sigma", "independent", "pairs", "exceedances"});
    const std::size_t K = c.k_grid.size();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        t.add(setup.record.levels[i / K].v, r.n, r.k, r.value, r.sigma, r.independent, r.pairs,
              setup.record.exceedances(i / K));
    }
    x.tables.push_back(std::move(t));
}

std::vector<std::size_t> d3_t_grid(const ExperimentConfig& c)
{
    if (!c.t_grid.empty()) return c.t_grid;
    std::set<std::size_t> ts{1, 10, 100, 1000, proof_gap(c.n)};
    const std::size_t l = c.d3_l == 0 ? c.n : c.d3_l;
    std::vector<std::size_t> out;
    for (auto t : ts) {
        if (t + l < c.record.length) out.push_back(t);
    }
    return out;
}

void run_d3(Ctx& x)
{
    const auto& c = x.c;
    const auto setup = record_for(x, {c.v_grid.front()}, {c.n});
    const std::size_t l = c.d3_l == 0 ? c.n : c.d3_l;
    const auto table = d3_stat(setup.record, 0, d3_t_grid(c), l);
    x.warn(table.warnings);
    Table t("d3", {"t", "l", "joint", "product", "gamma", "sigma", "segments", "proof_choice"});
    for (const auto& r : table.rows) t.add(r.t, table.l, r.joint, r.product, r.gamma, r.sigma, r.segments, r.proof_choice);
    x.tables.push_back(std::move(t));
}

void add_repp_rows(Table& counts, Table& gaps, const std::string& source, const ReppCounts& rc)
{
    for (std::size_t t = 0; t < rc.trials; ++t) {
        for (std::size_t w = 0; w < rc.windows.size(); ++w) counts.add(source, t, w, rc.counts[w][t]);
    }
    for (double g : rc.gaps) gaps.add(source, g);
}

void run_repp(Ctx& x)
{
    const auto& c = x.c;
    const auto setup = record_for(x, {c.v_grid.front()}, {c.n});
    const auto rc = repp(setup.record, 0, c.repp.windows, c.repp.max_trials);
    x.warn(rc.warnings);
    Table windows("windows", {"window", "a", "b"});
    for (std::size_t w = 0; w < c.repp.windows.size(); ++w) {
        for (const auto& [a, b] : c.repp.windows[w].intervals) windows.add(w, a, b);
    }
    Table counts("counts", {"source", "trial", "window", "count"});
    Table gaps("gaps", {"source", "gap"});
    add_repp_rows(counts, gaps, "map", rc);
    if (c.repp.control_trials > 0) {
        add_repp_rows(counts, gaps, "poisson", synthetic_poisson_repp(c.repp.windows, c.repp.control_trials, c.seed));
    }
    x.tables.push_back(std::move(windows));
    x.tables.push_back(std::move(counts));
    x.tables.push_back(std::move(gaps));
}

void run_flow(Ctx& x)
{
    const auto& c = x.c;
    const auto m = obtain_measure(c, x.exec, x.warnings);
    const SectionPoint p0 = resolve_center(c, &m);
    const Roof roof = c.flow.roof == "unit" ? Roof::constant(1.0) : Roof::from(c.params);
    const auto rt = mean_return_time(c.system, c.params, roof, c.flow.return_length, c.seed, c.burn_in);
    if (rt.truncated) x.warnings.push_back("return time orbit truncated");
    const SuspensionPoint x0{p0, c.flow.height * roof(p0)};
    const auto fit = fit_scaling(m, Observable{p0, Shape::ball});
    FlowOptions fo;
    fo.trials = c.trials;
    fo.seed = c.seed;
    fo.zero_start_height = c.flow.zero_start_height;
    fo.exec = x.exec;
    fo.burn_in = c.burn_in;
    const auto rep = flow_evl(c.system, c.params, roof, x0, c.n, rt.mean, fit, fo, c.flow.epsilon);
    if (rep.excluded > 0) x.warnings.push_back(std::to_string(rep.excluded) + " flow trials truncated and excluded");

    x.tables.push_back(center_table(p0));
    Table norm("normalization", {"hbar", "N", "horizon", "u0", "dimension", "log_c", "a_N", "b_N"});
    norm.add(rep.hbar, rep.N, rep.horizon, x0.u, fit.dimension, fit.log_c, rep.a_N, rep.b_N);
    x.tables.push_back(std::move(norm));
    Table trials("flow", {"trial", "phi_T", "Phi_N", "elapsed", "returns", "complete_max", "truncated"});
    for (std::size_t t = 0; t < rep.trials.size(); ++t) {
        const auto& tr = rep.trials[t];
        trials.add(t, tr.phi_T, tr.Phi_N, tr.elapsed, tr.returns, tr.complete_max, tr.truncated);
    }
    x.tables.push_back(std::move(trials));
    Table stab("stability", {"epsilon", "b_term", "a_term"});
    for (const auto& s : rep.stability) stab.add(s.epsilon, s.b_term, s.a_term);
    x.tables.push_back(std::move(stab));
}

void run_corr(Ctx& x)
{
    const auto& c = x.c;
    CorrObservable psi;
    psi.kind = c.corr.observable;
    psi.width = c.corr.width;
    psi.level = c.corr.level;
    if (psi.kind == CorrObservable::Kind::bump) {
        if (c.center.mode == CenterSpec::Mode::random_generic) {
            const auto m = obtain_measure(c, x.exec, x.warnings);
            psi.center = resolve_center(c, &m);
        }
        else {
            psi.center = resolve_center(c, nullptr);
        }
        x.tables.push_back(center_table(psi.center));
    }
    const auto est = corr_estimate(c.system, c.params, psi, c.corr.lags, c.corr.length, c.seed, c.corr.members, x.exec);
    Table t("corr", {"lag", "value", "sigma"});
    for (const auto& r : est.rows) t.add(r.lag, r.value, r.sigma);
    x.tables.push_back(std::move(t));
}

// Summaries, from tables only.

using Tables = std::vector<Table>;

const Table& find(const Tables& ts, std::string_view name)
{
    for (const auto& t : ts) {
        if (t.name() == name) return t;
    }
    throw ValidationError("missing table '" + std::string(name) + "'");
}

bool has_table(const Tables& ts, std::string_view name)
{
    return std::any_of(ts.begin(), ts.end(), [&](const Table& t) { return t.name() == name; });
}

bool flag(const Table& t, std::size_t row, std::string_view col) { return t.text(row, col) == "true"; }

json ks_json(const std::vector<double>& maxima, double a, double b, std::vector<std::string>& warnings,
             const std::string& label)
{
    if (maxima.size() < 1000) {
        warnings.push_back(label + ": fewer than 1e3 maxima; no Gumbel KS");
        return nullptr;
    }
    const auto ks = gumbel_ks(maxima, a, b);
    return {{"ks", ks.ks}, {"p_value", ks.p_value}, {"size", ks.size}, {"mle_location", ks.mle.location},
            {"mle_scale", ks.mle.scale}};
}

json center_json(const Tables& ts)
{
    if (!has_table(ts, "center")) return nullptr;
    const auto& t = find(ts, "center");
    return {{"x", t.number(0, "x")}, {"y", t.number(0, "y")}};
}

json levels_json(const Table& lv)
{
    json out = json::array();
    bool all = true;
    for (std::size_t i = 0; i < lv.size(); ++i) {
        out.push_back({{"v", lv.number(i, "v")},
                       {"n", lv.number(i, "n")},
                       {"u", lv.number(i, "u")},
                       {"radius", lv.number(i, "radius")},
                       {"achieved", lv.number(i, "achieved")},
                       {"bracket", {lv.number(i, "bracket_lo"), lv.number(i, "bracket_hi")}},
                       {"in_bracket", flag(lv, i, "in_bracket")}});
        all = all && flag(lv, i, "in_bracket");
    }
    return {{"table", out}, {"all_in_bracket", all}};
}

json summarize_measure(const Tables& ts, std::vector<std::string>& warnings)
{
    json s;
    const auto& q = find(ts, "quadrants");
    double total = 0.0;
    json masses;
    for (std::size_t i = 0; i < q.size(); ++i) {
        total += q.number(i, "count");
        masses[q.text(i, "quadrant")] = q.number(i, "mass");
    }
    s["samples"] = total;
    s["quadrant_mass"] = masses;
    const auto& r = find(ts, "radial");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double rad = r.number(i, "radius");
        if (rad <= 0.125 && r.number(i, "count") >= static_cast<double>(kMinBallSamples)) {
            xs.push_back(std::log(rad));
            ys.push_back(std::log(r.number(i, "mass")));
        }
    }
    if (xs.size() >= 4) {
        const auto f = stats::linear_fit(xs, ys);
        s["local_dimension"] = {{"dimension", f.slope}, {"log_c", f.intercept}, {"r2", f.r2}, {"radii", f.points}};
    }
    else {
        warnings.push_back("fewer than 4 resolved radii; no local dimension");
        s["local_dimension"] = nullptr;
    }
    return s;
}

json summarize_sbc(const Tables& ts)
{
    const auto& t = find(ts, "sbc");
    std::map<double, std::vector<double>> ratios;
    std::map<double, double> expected;
    std::set<double> truncated;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (flag(t, i, "truncated")) {
            truncated.insert(t.number(i, "member"));
            continue;
        }
        const double n = t.number(i, "checkpoint");
        ratios[n].push_back(t.number(i, "ratio"));
        expected[n] = t.number(i, "E_n");
    }
    json cps = json::array();
    for (const auto& [n, r] : ratios) {
        cps.push_back({{"n", n},
                       {"E_n", expected[n]},
                       {"members", r.size()},
                       {"mean_ratio", stats::mean(r)},
                       {"std_ratio", r.size() > 1 ? stats::stddev(r) : 0.0}});
    }
    const auto& tg = find(ts, "targets");
    double side = 0.0;
    for (std::size_t i = 0; i < tg.size(); ++i) side = std::max(side, tg.number(i, "side"));
    json s;
    s["checkpoints"] = cps;
    s["excluded_members"] = truncated.size();
    s["side_condition"] = side;
    if (!cps.empty()) {
        s["terminal_mean_ratio"] = cps.back()["mean_ratio"];
        s["terminal_std_ratio"] = cps.back()["std_ratio"];
    }
    return s;
}

json summarize_evt(const ExperimentConfig& c, const Tables& ts, std::vector<std::string>& warnings)
{
    const auto& sc = find(ts, "scaling");
    const double d = sc.number(0, "dimension"), log_c = sc.number(0, "log_c");
    const auto& lv = find(ts, "levels");
    const auto& mx = find(ts, "maxima");
    const double a = d, b = (std::log(static_cast<double>(c.n)) + log_c) / d;

    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < mx.size(); ++i) groups[{mx.text(i, "source"), mx.text(i, "mode")}].push_back(i);

    json runs = json::array();
    for (const auto& [key, idx] : groups) {
        std::vector<double> dist, maxima;
        for (auto i : idx) {
            if (flag(mx, i, "truncated")) continue;
            dist.push_back(mx.number(i, "min_distance"));
            maxima.push_back(mx.number(i, "M_n"));
        }
        const double used = static_cast<double>(dist.size());
        json rows = json::array();
        double worst = 0.0;
        for (std::size_t l = 0; l < lv.size(); ++l) {
            const double radius = lv.number(l, "radius"), v = lv.number(l, "v");
            const double below =
                static_cast<double>(std::count_if(dist.begin(), dist.end(), [&](double x) { return x >= radius; }));
            const double p = used > 0 ? below / used : 0.0;
            const double limit = std::exp(-std::exp(-v));
            worst = std::max(worst, std::abs(p - limit));
            rows.push_back({{"v", v},
                            {"u", lv.number(l, "u")},
                            {"p_hat", p},
                            {"limit", limit},
                            {"abs_error", std::abs(p - limit)},
                            {"sigma", used > 0 ? std::sqrt(limit * (1.0 - limit) / used) : 0.0}});
        }
        runs.push_back({{"source", key.first},
                        {"mode", key.second},
                        {"trials", used},
                        {"excluded", idx.size() - dist.size()},
                        {"levels", rows},
                        {"max_abs_error", worst},
                        {"gumbel", ks_json(maxima, a, b, warnings, key.first + "/" + key.second)}});
    }
    json s;
    s["center"] = center_json(ts);
    s["scaling"] = {{"dimension", d}, {"log_c", log_c}, {"r2", sc.number(0, "r2")}, {"a_n", a}, {"b_n", b}};
    s["levels"] = levels_json(lv);
    s["runs"] = runs;
    return s;
}

json summarize_dprime(const Tables& ts)
{
    const auto& t = find(ts, "dprime");
    struct Cell {
        double value, sigma, independent;
    };
    std::map<double, std::map<double, std::map<double, Cell>>> by; // v -> n -> k
    for (std::size_t i = 0; i < t.size(); ++i) {
        by[t.number(i, "v")][t.number(i, "n")][t.number(i, "k")] = {t.number(i, "value"), t.number(i, "sigma"),
                                                                    t.number(i, "independent")};
    }
    json out = json::array();
    for (const auto& [v, ns] : by) {
        json in_k = json::array();
        for (const auto& [n, ks] : ns) {
            bool strict = true;
            const Cell* prev = nullptr;
            for (const auto& [k, cell] : ks) {
                if (prev && !(cell.value < prev->value)) strict = false;
                prev = &cell;
            }
            const double first = ks.begin()->second.value, last = ks.rbegin()->second.value;
            in_k.push_back({{"n", n},
                            {"strictly_decreasing_in_k", strict},
                            {"plateau_ratio", first > 0 ? last / first : 0.0}});
        }
        // Trend in n at each k.
        std::map<double, std::vector<std::pair<double, Cell>>> per_k;
        for (const auto& [n, ks] : ns) {
            for (const auto& [k, cell] : ks) per_k[k].emplace_back(n, cell);
        }
        json in_n = json::array();
        for (const auto& [k, cells] : per_k) {
            bool strict = true, within = true;
            json values = json::array();
            for (std::size_t i = 0; i < cells.size(); ++i) {
                values.push_back(cells[i].second.value);
                if (i == 0) continue;
                const auto& a = cells[i - 1].second;
                const auto& b = cells[i].second;
                if (!(b.value < a.value)) strict = false;
                if (b.value > a.value + 2.0 * std::hypot(a.sigma, b.sigma)) within = false;
            }
            in_n.push_back({{"k", k},
                            {"values", values},
                            {"strictly_decreasing_in_n", strict},
                            {"nonincreasing_in_n_within_2sigma", within}});
        }
        out.push_back({{"v", v}, {"by_n", in_k}, {"by_k", in_n}});
    }
    return {{"center", center_json(ts)}, {"levels", levels_json(find(ts, "levels"))}, {"dprime", out}};
}

json summarize_d3(const Tables& ts)
{
    const auto& t = find(ts, "d3");
    json rows = json::array();
    json proof = nullptr;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double gamma = t.number(i, "gamma"), sigma = t.number(i, "sigma");
        json r = {{"t", t.number(i, "t")},
                  {"gamma", gamma},
                  {"sigma", sigma},
                  {"below_3_sigma", gamma < 3.0 * sigma},
                  {"proof_choice", flag(t, i, "proof_choice")}};
        if (flag(t, i, "proof_choice")) proof = r;
        rows.push_back(r);
    }
    return {{"center", center_json(ts)}, {"levels", levels_json(find(ts, "levels"))}, {"rows", rows}, {"proof_choice", proof}};
}

json summarize_repp(const Tables& ts, std::vector<std::string>& warnings)
{
    const auto& win = find(ts, "windows");
    std::map<std::size_t, double> length;
    for (std::size_t i = 0; i < win.size(); ++i) {
        length[static_cast<std::size_t>(win.number(i, "window"))] += win.number(i, "b") - win.number(i, "a");
    }
    const auto& ct = find(ts, "counts");
    std::map<std::string, std::map<std::size_t, std::vector<std::uint64_t>>> counts;
    for (std::size_t i = 0; i < ct.size(); ++i) {
        counts[ct.text(i, "source")][static_cast<std::size_t>(ct.number(i, "window"))].push_back(
            static_cast<std::uint64_t>(ct.number(i, "count")));
    }
    const auto& gp = find(ts, "gaps");
    std::map<std::string, std::vector<double>> gaps;
    for (std::size_t i = 0; i < gp.size(); ++i) gaps[gp.text(i, "source")].push_back(gp.number(i, "gap"));

    json sources = json::array();
    for (const auto& [source, by_window] : counts) {
        json windows = json::array();
        for (const auto& [w, c] : by_window) {
            std::vector<double> cd(c.begin(), c.end());
            const auto chi = stats::poisson_chi2(c, length[w]);
            windows.push_back({{"window", w},
                               {"length", length[w]},
                               {"trials", c.size()},
                               {"mean", stats::mean(cd)},
                               {"dispersion", stats::dispersion_index(cd)},
                               {"chi2", chi.statistic},
                               {"chi2_dof", chi.dof},
                               {"chi2_p", chi.p_value}});
        }
        json gap = nullptr;
        if (gaps[source].size() >= 2) {
            const auto& g = gaps[source];
            gap = {{"count", g.size()}, {"ks", stats::ks_distance(g, stats::exponential_cdf)}};
        }
        else {
            warnings.push_back(source + ": too few gaps for a KS test");
        }
        sources.push_back({{"source", source}, {"windows", windows}, {"gaps", gap}});
    }
    json s{{"center", center_json(ts)}, {"sources", sources}};
    if (has_table(ts, "levels")) s["levels"] = levels_json(find(ts, "levels"));
    return s;
}

json summarize_flow(const Tables& ts, std::vector<std::string>& warnings)
{
    const auto& nm = find(ts, "normalization");
    const double a = nm.number(0, "a_N"), b = nm.number(0, "b_N");
    const auto& fl = find(ts, "flow");
    std::vector<double> phi_T, Phi_N;
    for (std::size_t i = 0; i < fl.size(); ++i) {
        if (flag(fl, i, "truncated")) continue;
        phi_T.push_back(fl.number(i, "phi_T"));
        Phi_N.push_back(fl.number(i, "Phi_N"));
    }
    const auto& st = find(ts, "stability");
    json stab = json::array();
    bool decreasing = true;
    for (std::size_t i = 0; i < st.size(); ++i) {
        stab.push_back({{"epsilon", st.number(i, "epsilon")}, {"b_term", st.number(i, "b_term")},
                        {"a_term", st.number(i, "a_term")}});
        if (i > 0 && !(st.number(i, "b_term") < st.number(i - 1, "b_term") &&
                       st.number(i, "a_term") <= st.number(i - 1, "a_term"))) {
            decreasing = false;
        }
    }
    return {{"center", center_json(ts)},
            {"hbar", nm.number(0, "hbar")},
            {"N", nm.number(0, "N")},
            {"horizon", nm.number(0, "horizon")},
            {"a_N", a},
            {"b_N", b},
            {"trials", phi_T.size()},
            {"excluded", fl.size() - phi_T.size()},
            {"phi_T", ks_json(phi_T, a, b, warnings, "phi_T")},
            {"Phi_N", ks_json(Phi_N, a, b, warnings, "Phi_N")},
            {"stability", stab},
            {"stability_decreasing", decreasing}};
}

json summarize_corr(const ExperimentConfig& c, const Tables& ts, std::vector<std::string>& warnings)
{
    const auto& t = find(ts, "corr");
    CorrEstimate est;
    for (std::size_t i = 0; i < t.size(); ++i) {
        est.rows.push_back({static_cast<std::size_t>(t.number(i, "lag")), t.number(i, "value"), t.number(i, "sigma")});
    }
    if (est.rows.empty()) throw ValidationError("corr table is empty");
    est.variance = est.rows[0].value;
    const double points = static_cast<double>(c.corr.length / c.corr.members * c.corr.members);
    est.noise_floor = 3.0 * est.variance / std::sqrt(points);
    fit_envelope(est);
    warnings.insert(warnings.end(), est.warnings.begin(), est.warnings.end());
    json s{{"variance", est.variance},
           {"noise_floor", est.noise_floor},
           {"fit_range", {est.fit_first, est.fit_last}},
           {"decaying", est.decaying}};
    if (est.fit_last >= 3) s["fit"] = {{"slope", est.fit.slope}, {"intercept", est.fit.intercept}, {"r2", est.fit.r2}};
    s["rate"] = est.decaying ? json(est.rate) : json(nullptr);
    s["center"] = center_json(ts);
    return s;
}

} // namespace

json summarize(const ExperimentConfig& config, const std::vector<Table>& tables)
{
    std::vector<std::string> warnings;
    json s;
    switch (config.experiment) {
    case Experiment::measure: s = summarize_measure(tables, warnings); break;
    case Experiment::sbc: s = summarize_sbc(tables); break;
    case Experiment::evt: s = summarize_evt(config, tables, warnings); break;
    case Experiment::dprime: s = summarize_dprime(tables); break;
    case Experiment::d3: s = summarize_d3(tables); break;
    case Experiment::repp: s = summarize_repp(tables, warnings); break;
    case Experiment::flow_evt: s = summarize_flow(tables, warnings); break;
    case Experiment::corr: s = summarize_corr(config, tables, warnings); break;
    }
    s["notes"] = warnings;
    return s;
}

ExperimentReport execute(const ExperimentConfig& config, Exec exec)
{
    ExperimentReport report;
    report.config = config;
    Ctx x{config, exec, report.tables, report.warnings};
    switch (config.experiment) {
    case Experiment::measure: run_measure(x); break;
    case Experiment::sbc: run_sbc_experiment(x); break;
    case Experiment::evt: run_evt(x); break;
    case Experiment::dprime: run_dprime(x); break;
    case Experiment::d3: run_d3(x); break;
    case Experiment::repp: run_repp(x); break;
    case Experiment::flow_evt: run_flow(x); break;
    case Experiment::corr: run_corr(x); break;
    }
    report.summary = summarize(config, report.tables);
    return report;
}

void write_report(const ExperimentReport& report, const fs::path& dir)
{
    fs::create_directories(dir);
    for (const auto& t : report.tables) io::write_atomic(dir / (t.name() + ".csv"), io::to_csv(t));
    io::write_atomic(dir / "summary.json", report.to_json().dump(2) + "\n");
}

ExperimentReport run(const ExperimentConfig& config, Exec exec)
{
    validate(config);
    const double steps = planned_steps(config);
    if (steps > config.budget) {
        throw BudgetError("planned " + io::format_number(steps) + " map steps exceed budget " +
                          io::format_number(config.budget));
    }
    auto report = execute(config, exec);
    write_report(report, config.output);
    return report;
}

Resummary resummarize(const fs::path& dir)
{
    const auto j = json::parse(io::read_file(dir / "summary.json"));
    for (const char* key : {"config", "tables", "summary"}) {
        if (!j.contains(key)) throw ValidationError("summary.json lacks '" + std::string(key) + "'");
    }
    const auto config = parse_config(j["config"]);
    std::vector<Table> tables;
    for (const auto& name : j["tables"]) {
        const auto n = name.get<std::string>();
        tables.push_back(io::parse_csv(n, io::read_file(dir / (n + ".csv"))));
    }
    Resummary out;
    out.stored = j["summary"];
    out.recomputed = summarize(config, tables);
    out.matches = out.stored == out.recomputed;
    return out;
}

} // namespace lorenzlab
