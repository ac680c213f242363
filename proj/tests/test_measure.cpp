// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "lorenzlab/errors.hpp"
#include "lorenzlab/measure.hpp"
#include "lorenzlab/stats.hpp"

#include <cmath>
#include <sstream>

using namespace lorenzlab;

namespace {

const ModelParams kParams;

const EmpiricalMeasure& baker_measure()
{
    static const EmpiricalMeasure m = build_empirical_measure(MapKind::baker, kParams, 1000000, 1000, 2024);
    return m;
}

const EmpiricalMeasure& lorenz_measure()
{
    static const EmpiricalMeasure m = build_empirical_measure(MapKind::lorenz, kParams, 1000000, 1000, 77);
    return m;
}

} // namespace

TEST_CASE("baker measure: quadrant masses are Lebesgue")
{
    const auto& m = baker_measure();
    CHECK(m.size() == 1000000);
    const SectionPoint centers[] = {{-0.25, -0.25}, {-0.25, 0.25}, {0.25, -0.25}, {0.25, 0.25}};
    for (auto c : centers) CHECK(ball_mass(m, c, 0.25, Shape::square) == doctest::Approx(0.25).epsilon(0.04));
}

TEST_CASE("doubling measure: 64-bin histogram is uniform within 2%")
{
    const auto m = build_empirical_measure(MapKind::doubling, kParams, 1000000, 1000, 31);
    std::vector<double> hist(64, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        hist[std::min<std::size_t>(63, static_cast<std::size_t>((m.sample(i).x + 0.5) * 64))] += 1.0;
    }
    for (double h : hist) CHECK(h / (1e6 / 64) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("lorenz measure: independent seeds agree on quadrant masses")
{
    const auto& a = lorenz_measure();
    const auto b = build_empirical_measure(MapKind::lorenz, kParams, 1000000, 1000, 78);

    // Monte Carlo sigma of an orbit average by batch means over a pilot orbit.
    auto pilot = random_stepper(MapKind::lorenz, kParams, RandomStream(5, 5), 1000);
    std::vector<double> batches;
    double acc = 0.0;
    visit_stepper(pilot, [&](auto& s) {
        for_each_point(s, 1000000, [&](std::size_t i, SectionPoint p) {
            acc += (p.x > 0 && p.y > 0) ? 1.0 : 0.0;
            if ((i + 1) % 10000 == 0) {
                batches.push_back(acc / 10000);
                acc = 0.0;
            }
        });
    });
    const double sigma_one = stats::stddev(batches) / std::sqrt(static_cast<double>(batches.size()));
    const double sigma_diff = std::sqrt(2.0) * sigma_one;

    const SectionPoint centers[] = {{-0.25, -0.25}, {-0.25, 0.25}, {0.25, -0.25}, {0.25, 0.25}};
    for (auto c : centers) {
        const double ma = ball_mass(a, c, 0.25, Shape::square);
        const double mb = ball_mass(b, c, 0.25, Shape::square);
        CHECK(std::abs(ma - mb) <= 3.0 * sigma_diff);
    }
}

TEST_CASE("grid-indexed counts equal the brute-force scan")
{
    const auto& m = lorenz_measure();
    RandomStream rng(8, 0);
    for (int i = 0; i < 40; ++i) {
        const SectionPoint c = m.sample(static_cast<std::size_t>(rng.below(m.size())));
        const double r = std::exp(rng.uniform(std::log(1e-4), std::log(0.8)));
        const Shape shape = i % 2 ? Shape::ball : Shape::square;
        CHECK(m.count_within(c, r, shape) == m.count_within_bruteforce(c, r, shape));
    }
    CHECK(m.count_within({0.5, 0.5}, 0.3, Shape::ball) == m.count_within_bruteforce({0.5, 0.5}, 0.3, Shape::ball));
}

TEST_CASE("ball_mass")
{
    const auto& m = baker_measure();
    CHECK(ball_mass(m, {0.1, 0.1}, 1.5) == 1.0);
    CHECK(ball_mass(m, {0.1, 0.1}, 1.5, Shape::square) == 1.0);
    CHECK_THROWS_AS(ball_mass(m, {0.0, 0.0}, 0.0), DomainError);

    const double r = 0.1;
    const double expected = 4 * r * r;
    const double sigma = std::sqrt(expected * (1 - expected) / 1e6);
    CHECK(std::abs(ball_mass(m, {0.2, -0.1}, r, Shape::square) - expected) <= 3 * sigma);
    CHECK(std::abs(ball_mass(m, {0.2, -0.1}, r) - M_PI * r * r) <= 3 * sigma);

    double prev = 0.0;
    for (double rr = 1e-3; rr < 1.0; rr *= 1.3) {
        const double mass = ball_mass(lorenz_measure(), {0.1, 0.2}, rr);
        CHECK(mass >= prev);
        prev = mass;
    }
}

TEST_CASE("invert_mass")
{
    const auto& m = baker_measure();
    const SectionPoint c{0.1, -0.2};
    const double r = invert_mass(m, c, 0.01, Shape::square);
    CHECK(r == doctest::Approx(0.05).epsilon(0.05));

    for (double t : {0.001, 0.01, 0.1, 0.5}) {
        const double rt = invert_mass(m, c, t);
        const double mass = ball_mass(m, c, rt);
        CHECK(mass >= t);
        CHECK(mass <= t * (1.0 + 1.0 / (t * 1e6)) + 1e-15);
        // Any smaller radius holds less mass than the target.
        CHECK(ball_mass(m, c, std::nextafter(rt, 0.0)) < t);
    }

    const auto& lm = lorenz_measure();
    const SectionPoint on_attractor = lm.sample(12345);
    CHECK(invert_mass(lm, on_attractor, 0.5) < std::sqrt(2.0));

    CHECK_THROWS_AS(invert_mass(m, c, 10.0 / 1e6), ResolutionError);
    CHECK_THROWS_AS(invert_mass(m, c, 0.0), DomainError);
    CHECK_THROWS_AS(invert_mass(m, c, 1.0), DomainError);
}

TEST_CASE("radial profile round trip")
{
    const auto& m = lorenz_measure();
    const SectionPoint c = m.sample(999);
    const auto prof = m.radial_profile(c, Shape::ball, 0.05);
    for (double r : {0.001, 0.01, 0.05}) CHECK(prof.count(r) == m.count_within(c, r, Shape::ball));
    CHECK_THROWS_AS(prof.count(0.06), DomainError);
    // Right-continuity on the sample grid: mass at a sample distance
    // includes that sample.
    const auto d = prof.distances();
    REQUIRE(d.size() > 100);
    CHECK(prof.count(d[99]) >= 100);
    CHECK(prof.count(std::nextafter(d[99], 0.0)) < 100);
}

TEST_CASE("local dimension")
{
    SUBCASE("baker: Lebesgue in the plane")
    {
        const auto est = local_dimension(baker_measure(), {0.05, 0.1}, 0.1, 0.1 / 128);
        CHECK(est.dimension == doctest::Approx(2.0).epsilon(0.05));
        CHECK(est.r2 > 0.99);
        CHECK(est.radii.size() >= 4);
        for (std::size_t i = 1; i < est.radii.size(); ++i) CHECK(est.radii[i] < est.radii[i - 1]);
    }
    SUBCASE("doubling: Lebesgue on a segment")
    {
        const auto m = build_empirical_measure(MapKind::doubling, kParams, 1000000, 1000, 4);
        const auto est = local_dimension(m, {0.123, 0.0}, 0.1, 0.1 / 128);
        CHECK(std::abs(est.dimension - 1.0) <= 0.05);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(local_dimension(baker_measure(), {0.0, 0.0}, 0.1, 0.01), DomainError);
        CHECK_THROWS_AS(local_dimension(baker_measure(), {0.0, 0.0}, 1e-3, 1e-3 / 256), EstimationError);
    }
}

TEST_CASE("annulus mass")
{
    const auto& m = baker_measure();
    const SectionPoint c{-0.1, 0.15};
    CHECK(annulus_mass(m, c, 0.1, 0.0) == 0.0);
    const double r = 0.1, eps = 0.02;
    const double expected = M_PI * ((r + eps) * (r + eps) - r * r);
    const double sigma = std::sqrt(expected * (1 - expected) / 1e6);
    CHECK(std::abs(annulus_mass(m, c, r, eps) - expected) <= 3 * sigma);

    const auto& lm = lorenz_measure();
    for (std::size_t i : {10u, 5000u, 200000u}) {
        const double rr = 0.05;
        const double e = rr * rr;
        CHECK(annulus_mass(lm, lm.sample(i), rr, e) <= std::sqrt(e));
    }
}

TEST_CASE("ball mass spread scales like n^-1/2")
{
    auto spread = [](std::size_t n) {
        std::vector<double> masses;
        for (std::uint64_t s = 0; s < 30; ++s) {
            const auto m = build_empirical_measure(MapKind::baker, kParams, n, 1000, 1000 + s,
                                                   {.members = 1, .cell_exponent = 8, .exec = Exec::serial});
            masses.push_back(ball_mass(m, {0.0, 0.0}, 0.1));
        }
        return stats::stddev(masses);
    };
    const double ratio = spread(100000) / spread(400000);
    CHECK(ratio >= 2.0 / 1.5);
    CHECK(ratio <= 2.0 * 1.5);
}

TEST_CASE("measure snapshot round trip")
{
    const auto& m = lorenz_measure();
    std::stringstream ss;
    m.save(ss);
    const auto back = EmpiricalMeasure::load(ss);
    CHECK(back.size() == m.size());
    CHECK(back.meta().params_hash == kParams.hash());
    CHECK(back.meta().seed == 77);
    for (std::size_t i = 0; i < m.size(); i += 9973) CHECK(back.sample(i) == m.sample(i));
    CHECK(back.count_within({0.1, 0.2}, 0.05, Shape::ball) == m.count_within({0.1, 0.2}, 0.05, Shape::ball));

    std::stringstream bad("not a snapshot");
    CHECK_THROWS_AS(EmpiricalMeasure::load(bad), ValidationError);
}

TEST_CASE("measure construction is independent of threading")
{
    const MeasureOptions par{.members = 8, .cell_exponent = 10, .exec = Exec::parallel};
    const MeasureOptions ser{.members = 8, .cell_exponent = 10, .exec = Exec::serial};
    set_worker_count(4);
    const auto a = build_empirical_measure(MapKind::lorenz, kParams, 200000, 1000, 3, par);
    set_worker_count(0);
    const auto b = build_empirical_measure(MapKind::lorenz, kParams, 200000, 1000, 3, ser);
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) same = same && a.sample(i) == b.sample(i);
    CHECK(same);
}

TEST_CASE("i.i.d. resampler draws stored samples")
{
    const auto& m = baker_measure();
    ResampleStepper s(m, RandomStream(1, 1));
    for (int i = 0; i < 100; ++i) {
        const auto p = s.point();
        CHECK(m.count_within(p, 0.0, Shape::ball) >= 1);
        s.step();
    }
}
