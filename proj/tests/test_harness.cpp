// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "lorenzlab/config.hpp"
#include "lorenzlab/errors.hpp"
#include "lorenzlab/harness.hpp"
#include "lorenzlab/io.hpp"

#include <filesystem>
#include <limits>
#include <unistd.h>

using namespace lorenzlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("lorenzlab_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

std::string csv_body(const fs::path& dir, const std::string& table) { return io::read_file(dir / (table + ".csv")); }

} // namespace

TEST_CASE("numbers round-trip through text")
{
    for (double v : {0.0, -0.0, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, std::numeric_limits<double>::denorm_min()}) {
        CHECK(io::parse_number(io::format_number(v)) == v);
    }
    CHECK(std::isinf(io::parse_number(io::format_number(std::numeric_limits<double>::infinity()))));
    CHECK_THROWS_AS(io::parse_number("1.5x"), ValidationError);
}

TEST_CASE("csv follows RFC 4180")
{
    io::Table t("t", {"name", "value"});
    t.add("plain", 1.5);
    t.add("comma,inside", 2);
    t.add("say \"hi\"", true);
    t.add("two\r\nlines", -0.25);
    const auto text = io::to_csv(t);
    CHECK(text.substr(0, 12) == "name,value\r\n");
    CHECK(text.find("\"comma,inside\",2\r\n") != std::string::npos);
    CHECK(text.find("\"say \"\"hi\"\"\",true\r\n") != std::string::npos);
    const auto back = io::parse_csv("t", text);
    CHECK(back.header() == t.header());
    CHECK(back.rows() == t.rows());
    CHECK(back.number(3, "value") == -0.25);
    CHECK_THROWS_AS(io::parse_csv("bad", "a,b\r\n1\r\n"), ValidationError);
    CHECK_THROWS_AS(io::parse_csv("bad", "a\r\n\"open\r\n"), ValidationError);
    CHECK_THROWS_AS(t.column("missing"), ValidationError);
}

TEST_CASE("atomic writes replace whole files")
{
    const auto dir = scratch("atomic");
    const auto path = dir / "f.txt";
    io::write_atomic(path, "first");
    io::write_atomic(path, "second");
    CHECK(io::read_file(path) == "second");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 1);
}

TEST_CASE("config parsing and validation")
{
    const json base = {{"experiment", "measure"}, {"system", "baker"}, {"seed", 5}};
    SUBCASE("defaults and echo round trip")
    {
        json j = base;
        j["measure"] = {{"samples", 1e7}};
        const auto c = parse_config(j);
        CHECK(c.measure.samples == 10000000);
        CHECK(c.system == MapKind::baker);
        const auto again = parse_config(c.to_json());
        CHECK(again.to_json() == c.to_json());
        CHECK(config_violations(c).empty());
    }
    SUBCASE("unknown keys are errors, nested ones named by path")
    {
        json j = base;
        j["trails"] = 10;
        CHECK_THROWS_WITH_AS(parse_config(j), "unknown key 'trails'", ValidationError);
        j = base;
        j["measure"] = {{"sample", 10}};
        CHECK_THROWS_WITH_AS(parse_config(j), "unknown key 'measure.sample'", ValidationError);
    }
    SUBCASE("master seed is mandatory")
    {
        json j = base;
        j.erase("seed");
        CHECK_THROWS_AS(parse_config(j), ValidationError);
    }
    SUBCASE("bad parameters name the violated inequality")
    {
        json j = base;
        j["params"] = {{"theta", 2.0}};
        const auto c = parse_config(j);
        CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("theta*(1/2)^alpha < 1"), ValidationError);
    }
    SUBCASE("type errors and counts")
    {
        json j = base;
        j["n"] = -3;
        CHECK_THROWS_AS(parse_config(j), ValidationError);
        j["n"] = 2.5;
        CHECK_THROWS_AS(parse_config(j), ValidationError);
        j["n"] = 0;
        CHECK_FALSE(config_violations(parse_config(j)).empty());
        j = base;
        j["experiment"] = "corr";
        j["corr"] = {{"lags", 300}, {"length", 1000}};
        const auto v = config_violations(parse_config(j));
        CHECK(v.size() == 2);
    }
}

TEST_CASE("measure experiment on baker")
{
    auto c = parse_config({{"experiment", "measure"},
                           {"system", "baker"},
                           {"seed", 1},
                           {"measure", {{"samples", 100000}, {"members", 4}}},
                           {"center", {{"mode", "point"}, {"x", 0.1}, {"y", 0.2}}}});
    c.output = scratch("measure").string();
    const auto rep = run(c);
    for (const auto& [name, mass] : rep.summary["quadrant_mass"].items()) {
        CHECK(mass.get<double>() == doctest::Approx(0.25).epsilon(0.04));
    }
    CHECK(rep.summary["local_dimension"]["dimension"].get<double>() == doctest::Approx(2.0).epsilon(0.05));
    const auto r = resummarize(c.output);
    CHECK(r.matches);
    const auto j = json::parse(io::read_file(fs::path(c.output) / "summary.json"));
    CHECK(j["build"] == std::string(build_id()));
    CHECK(j["params_hash"] == to_hex(c.params.hash()));
    CHECK(j["config"] == c.to_json());
}

TEST_CASE("reruns give byte-identical tables for any worker count")
{
    auto c = parse_config({{"experiment", "evt"},
                           {"system", "lorenz"},
                           {"seed", 3},
                           {"n", 500},
                           {"trials", 1000},
                           {"v_grid", {0.0, 1.0}},
                           {"measure", {{"samples", 1000000}, {"members", 4}}},
                           {"evt", {{"mode", "both"}}}});
    const auto a = scratch("det_a"), b = scratch("det_b"), s = scratch("det_s");
    set_worker_count(1);
    c.output = a.string();
    run(c);
    set_worker_count(2);
    c.output = b.string();
    run(c);
    set_worker_count(0);
    c.output = s.string();
    run(c, Exec::serial);
    for (const char* t : {"center", "scaling", "levels", "maxima"}) {
        CHECK(csv_body(a, t) == csv_body(b, t));
        CHECK(csv_body(a, t) == csv_body(s, t));
    }
    CHECK(resummarize(b).matches);
}

TEST_CASE("snapshots reproduce fresh measures")
{
    const auto dir = scratch("snap");
    auto c = parse_config({{"experiment", "measure"},
                           {"system", "lorenz"},
                           {"seed", 9},
                           {"measure", {{"samples", 200000}, {"members", 2}}}});
    c.output = (dir / "fresh").string();
    run(c);
    c.measure.snapshot = (dir / "m.bin").string();
    snapshot_measure(c);
    CHECK(fs::exists(c.measure.snapshot));
    c.output = (dir / "snap").string();
    run(c);
    CHECK(csv_body(dir / "fresh", "radial") == csv_body(dir / "snap", "radial"));
    auto other = c;
    other.seed = 10;
    std::vector<std::string> w;
    CHECK_THROWS_AS(obtain_measure(other, Exec::serial, w), ValidationError);
}

TEST_CASE("budget and hard errors")
{
    auto c = parse_config({{"experiment", "measure"}, {"seed", 1}, {"budget", 10}});
    c.output = scratch("budget").string();
    CHECK_THROWS_AS(run(c), BudgetError);
    CHECK_FALSE(fs::exists(c.output));
}
