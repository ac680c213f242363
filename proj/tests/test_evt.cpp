// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "lorenzlab/errors.hpp"
#include "lorenzlab/evt.hpp"

#include <cmath>

using namespace lorenzlab;

namespace {

const ModelParams kParams;

const EmpiricalMeasure& lorenz_measure()
{
    static const EmpiricalMeasure m = build_empirical_measure(MapKind::lorenz, kParams, 2000000, 1000, 21);
    return m;
}

const SectionPoint& center()
{
    static const SectionPoint c = generic_center(lorenz_measure(), kParams, 4, 1e-3);
    return c;
}

std::vector<Level> as_levels(const LevelSchedule& s)
{
    return {s.entries.begin(), s.entries.end()};
}

} // namespace

TEST_CASE("observable and level/ball duality")
{
    const Observable obs{{0.1, -0.2}, Shape::ball};
    CHECK(obs.value({0.1, -0.2}) == Observable::kCap);
    CHECK(obs.value({0.2, -0.2}) == doctest::Approx(-std::log(0.1)));
    RandomStream rng(1, 1);
    for (int i = 0; i < 10000; ++i) {
        const SectionPoint p{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        const double u = rng.uniform(0.0, 6.0);
        CHECK((obs.value(p) > u) == (obs.distance(p) < std::exp(-u)));
    }
}

TEST_CASE("levels")
{
    const Observable obs{center(), Shape::ball};
    const auto s = levels(lorenz_measure(), obs, {-1.0, 0.0, 1.0}, {1000, 10000}, 1.05);
    REQUIRE(s.entries.size() == 6);
    for (std::size_t n : {1000u, 10000u}) {
        CHECK(s.at(-1.0, n).u < s.at(0.0, n).u);
        CHECK(s.at(0.0, n).u < s.at(1.0, n).u);
        for (double v : {-1.0, 0.0, 1.0}) {
            const auto& e = s.at(v, n);
            const double target = std::exp(-v);
            const double k = target / static_cast<double>(n) * 2e6;
            CHECK(e.achieved >= target);
            CHECK(e.achieved <= target * (1.0 + 2.0 / k));
            CHECK(e.u == doctest::Approx(-std::log(e.radius)));
            const double num = v + std::log(static_cast<double>(n));
            CHECK(e.bracket_lo == doctest::Approx(num / 1.15));
            CHECK(e.bracket_hi == doctest::Approx(num / 0.95));
        }
    }
    CHECK(s.at(0.0, 10000).u > s.at(0.0, 1000).u);
    // Bracket arithmetic of the v = 0, n = 1e6, d = 1.05 example.
    CHECK(std::log(1e6) / 1.05 == doctest::Approx(13.157).epsilon(1e-4));
    CHECK(std::log(1e6) / 1.05 > std::log(1e6) / 1.15);
    CHECK(std::log(1e6) / 1.05 < std::log(1e6) / 0.95);
    CHECK_THROWS_AS(levels(lorenz_measure(), obs, {0.0}, {100000}, 1.05), ResolutionError);
}

TEST_CASE("periodic points and the non-periodicity check")
{
    const auto p = find_periodic_point(kParams, 2, 0.1);
    CHECK(std::abs(p.x) == doctest::Approx(0.116).epsilon(0.01));
    CHECK(lorenz_T(kParams, p.x) == doctest::Approx(-p.x).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(-0.25 / (1.0 + p.x * p.x)).epsilon(1e-12));
    const auto q = lorenz_F(kParams, lorenz_F(kParams, p));
    CHECK(q.x == doctest::Approx(p.x).epsilon(1e-12));
    CHECK(q.y == doctest::Approx(p.y).epsilon(1e-12));
    CHECK_THROWS_AS(check_non_periodic(MapKind::lorenz, kParams, Observable{p, Shape::ball}, 1e-6), PeriodicCenterError);
    CHECK_NOTHROW(check_non_periodic(MapKind::lorenz, kParams, Observable{center(), Shape::ball}, 1e-3));
}

TEST_CASE("block maxima of the i.i.d. control")
{
    const Observable obs{center(), Shape::ball};
    const auto s = levels(lorenz_measure(), obs, {-1.0, 0.0, 1.0}, {10000}, 1.0);
    MaximaOptions opt;
    opt.n = 10000;
    opt.trials = 1000;
    opt.seed = 3;
    const auto r = block_maxima_cdf(OrbitSource::iid(lorenz_measure()), obs, as_levels(s), opt);
    REQUIRE(r.rows.size() == 3);
    for (const auto& row : r.rows) {
        CHECK(std::abs(row.p_hat - row.limit) <= 3.0 * row.sigma);
        CHECK(row.hitting_identity);
    }
    CHECK(r.rows[0].p_hat <= r.rows[1].p_hat);
    CHECK(r.rows[1].p_hat <= r.rows[2].p_hat);
    CHECK(r.maxima().size() == 1000);
}

TEST_CASE("block maxima tails and modes")
{
    const Observable obs{center(), Shape::ball};
    const auto s = levels(lorenz_measure(), obs, {-3.0, 4.0}, {100}, 1.0);
    MaximaOptions opt;
    opt.n = 100;
    opt.trials = 2000;
    const auto src = OrbitSource::dynamics(MapKind::lorenz, kParams);
    const auto r = block_maxima_cdf(src, obs, as_levels(s), opt);
    CHECK(r.rows[0].p_hat < 0.01);
    CHECK(r.rows[1].p_hat > 0.95);

    opt.mode = MaximaMode::blocks;
    const auto a = block_maxima_cdf(src, obs, as_levels(s), opt);
    opt.exec = Exec::serial;
    const auto b = block_maxima_cdf(src, obs, as_levels(s), opt);
    for (std::size_t t = 0; t < a.trials.size(); ++t) CHECK(a.trials[t].min_distance == b.trials[t].min_distance);
    for (const auto& row : a.rows) CHECK(row.hitting_identity);
}

TEST_CASE("gumbel KS")
{
    RandomStream rng(7, 7);
    std::vector<double> g(10000);
    for (auto& x : g) x = -std::log(-std::log(rng.uniform_pos() * (1.0 - 1e-12)));
    const auto a = gumbel_ks(g, 1.0, 0.0);
    CHECK(a.ks <= 0.02);
    CHECK(a.mle.location == doctest::Approx(0.0).epsilon(0.03).scale(1.0));
    CHECK(a.mle.scale == doctest::Approx(1.0).epsilon(0.03));

    // Maxima of 1e3 i.i.d. exponentials minus log 1e3 are close to Gumbel.
    std::vector<double> m(1000);
    for (auto& x : m) {
        double best = 0.0;
        for (int i = 0; i < 1000; ++i) best = std::max(best, -std::log(rng.uniform_pos()));
        x = best;
    }
    CHECK(gumbel_ks(m, 1.0, std::log(1000.0)).ks <= 0.05);

    CHECK_THROWS_AS(gumbel_ks(std::vector<double>(1000, 2.0), 1.0, 0.0), EstimationError);
    CHECK_THROWS_AS(gumbel_ks(std::vector<double>(10, 2.0), 1.0, 0.0), DomainError);
}

TEST_CASE("D', D3 and REPP on the i.i.d. control")
{
    const Observable obs{center(), Shape::ball};
    const auto s = levels(lorenz_measure(), obs, {0.0}, {1000, 10000}, 1.0);
    const auto rec = record_exceedances(OrbitSource::iid(lorenz_measure()), obs, as_levels(s), 2000000, 10, 9);
    REQUIRE(rec.members() == 10);
    CHECK(rec.exceedances(1) < rec.exceedances(0));

    SUBCASE("D' matches the independence value")
    {
        const auto t = d_prime_stat(rec, {2, 5, 10, 20});
        for (std::size_t n : {1000u, 10000u}) {
            double prev = 1e300;
            for (std::size_t k : {2u, 5u, 10u, 20u}) {
                const auto& row = t.at(n, k);
                CHECK(std::abs(row.value - row.independent) <= 3.0 * row.sigma + 1e-12);
                CHECK(row.independent == doctest::Approx(1.0 / static_cast<double>(k)).epsilon(0.1));
                CHECK(row.value < prev);
                prev = row.value;
            }
        }
    }
    SUBCASE("D3")
    {
        const auto zero = d3_stat(rec, 1, {0, 10, 100}, 0);
        for (const auto& row : zero.rows) CHECK(row.gamma == 0.0);
        const auto t = d3_stat(rec, 0, {10, 100, 400}, 1000);
        for (const auto& row : t.rows) CHECK(row.gamma <= 3.0 * row.sigma);
        CHECK(proof_gap(100000) == 202269);
    }
    SUBCASE("REPP")
    {
        const std::vector<ReppWindow> w{{{{0.0, 1.0}}}, {{{0.0, 0.4}}}, {{{0.4, 1.0}}}, {{{0.0, 0.2}, {0.5, 0.7}}}};
        const auto r = repp(rec, 0, w);
        CHECK(r.a_n == doctest::Approx(1000.0).epsilon(0.05));
        CHECK(r.trials >= 19000);
        for (std::size_t t = 0; t < r.trials; ++t) CHECK(r.counts[1][t] + r.counts[2][t] == r.counts[0][t]);
        CHECK(r.mean == doctest::Approx(1.0).epsilon(0.05));
        CHECK(r.dispersion == doctest::Approx(1.0).epsilon(0.05));
        CHECK(r.gap_ks <= 0.02);
        CHECK(w[3].length() == doctest::Approx(0.4));
    }
}

TEST_CASE("synthetic Poisson control")
{
    const std::vector<ReppWindow> w{{{{0.0, 1.0}}}, {{{0.0, 0.5}}}, {{{0.5, 1.0}}}};
    const auto r = synthetic_poisson_repp(w, 10000, 5);
    CHECK(r.dispersion >= 0.95);
    CHECK(r.dispersion <= 1.05);
    CHECK(r.mean == doctest::Approx(1.0).epsilon(0.05));
    for (std::size_t t = 0; t < r.trials; ++t) CHECK(r.counts[1][t] + r.counts[2][t] == r.counts[0][t]);
    CHECK(r.chi2.p_value > 0.001);
    CHECK(r.gap_ks <= 0.02);
}

TEST_CASE("stationarity of the observable along an orbit")
{
    const Observable obs{center(), Shape::ball};
    std::vector<double> first, second;
    auto s = random_stepper(MapKind::lorenz, kParams, RandomStream(12, 0), 1000);
    visit_stepper(s, [&](auto& st) {
        for_each_point(st, 2000000, [&](std::size_t i, SectionPoint p) {
            (i < 1000000 ? first : second).push_back(obs.value(p));
        });
    });
    CHECK(stats::ks_two_sample(first, second) <= 0.02);
}
