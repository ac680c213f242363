// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "lorenzlab/errors.hpp"
#include "lorenzlab/flow.hpp"

#include <cmath>

using namespace lorenzlab;

namespace {
const ModelParams kParams;
const Roof kRoof = Roof::from(kParams);
} // namespace

TEST_CASE("advance_flow")
{
    const SuspensionPoint q{{0.3, -0.1}, 0.25};
    SUBCASE("t = 0 is the identity")
    {
        const auto s = advance_flow(MapKind::lorenz, kParams, kRoof, q, 0.0);
        CHECK(s.point.p == q.p);
        CHECK(s.point.u == q.u);
        CHECK(s.returns == 0);
    }
    SUBCASE("one full return lands on (F(p), 0)")
    {
        const SuspensionPoint base{q.p, 0.0};
        const auto s = advance_flow(MapKind::lorenz, kParams, kRoof, base, kRoof(q.p));
        CHECK(s.point.p == lorenz_F(kParams, q.p));
        CHECK(s.point.u == 0.0);
        CHECK(s.returns == 1);
    }
    SUBCASE("flow property")
    {
        for (double a : {0.3, 1.7, 5.2}) {
            for (double b : {0.01, 2.5, 9.0}) {
                const auto ab = advance_flow(MapKind::lorenz, kParams, kRoof,
                                             advance_flow(MapKind::lorenz, kParams, kRoof, q, a).point, b);
                const auto direct = advance_flow(MapKind::lorenz, kParams, kRoof, q, a + b);
                CHECK(ab.point.p == direct.point.p);
                CHECK(ab.point.u == doctest::Approx(direct.point.u).epsilon(1e-12).scale(1.0));
            }
        }
    }
    CHECK_THROWS_AS(advance_flow(MapKind::lorenz, kParams, kRoof, q, -1.0), DomainError);
    CHECK_THROWS_AS(advance_flow(MapKind::lorenz, kParams, kRoof, {{0.3, 0.0}, 100.0}, 1.0), DomainError);
}

TEST_CASE("mean return time")
{
    const auto c = mean_return_time(MapKind::lorenz, kParams, Roof::constant(1.5), 1000000, 1);
    CHECK(c.mean == 1.5);

    const auto b = mean_return_time(MapKind::baker, kParams, kRoof, 1000000, 2);
    const double exact = 2.0 + std::log(2.0);
    CHECK(std::abs(b.mean / exact - 1.0) <= 0.01);
    CHECK(b.checkpoints.back() == 1000000);
    CHECK(b.running.back() == b.mean);

    const auto l1 = mean_return_time(MapKind::lorenz, kParams, kRoof, 10000000, 3);
    const auto l2 = mean_return_time(MapKind::lorenz, kParams, kRoof, 10000000, 4);
    CHECK(std::abs(l1.mean / l2.mean - 1.0) <= 0.005);
}

TEST_CASE("segment maximum of phi")
{
    const SectionPoint p0{0.2, 0.1};
    const SuspensionPoint x0{p0, kRoof(p0) / 2};
    CHECK(segment_max_phi(kRoof, p0, x0) == Observable::kCap);
    CHECK(segment_max_phi(kRoof, {0.2, 0.2}, x0) == doctest::Approx(-std::log(0.1)));
    CHECK(-std::log(0.1) == doctest::Approx(2.3026).epsilon(1e-4));

    // Brute force over a time grid of step 1e-4.
    RandomStream rng(5, 5);
    for (int i = 0; i < 50; ++i) {
        const SectionPoint p{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        const SuspensionPoint y{{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)}, rng.uniform(0.0, 6.0)};
        const double h = kRoof(p);
        double best = -1e300;
        for (double u = 0.0; u < h; u += 1e-4) best = std::max(best, -std::log(suspension_distance({p, u}, y)));
        CHECK(std::abs(segment_max_phi(kRoof, p, y) - best) <= 1e-3);
    }
}

TEST_CASE("unit-height suspension reduces to the map")
{
    const SectionPoint p0{0.1, -0.1};
    const SuspensionPoint x0{p0, 0.5};
    ScalingFit fit;
    fit.dimension = 1.0;
    FlowOptions opt;
    opt.trials = 1000;
    opt.zero_start_height = true;
    const auto r = flow_evl(MapKind::lorenz, kParams, Roof::constant(1.0), x0, 200, 1.0, fit, opt);
    const Observable obs{p0, Shape::ball};
    for (std::size_t t = 0; t < r.trials.size(); ++t) {
        Stepper s = random_stepper(MapKind::lorenz, kParams, RandomStream(opt.seed, StreamPurpose::trial, t), 1000);
        double best = -1e300;
        visit_stepper(s, [&](auto& st) {
            for_each_point(st, 200, [&](std::size_t, SectionPoint p) { best = std::max(best, obs.value(p)); });
        });
        CHECK(r.trials[t].phi_T == best);
        CHECK(r.trials[t].Phi_N == best);
    }
}

TEST_CASE("flow maxima invariants and normalization stability")
{
    const SectionPoint p0{0.1, -0.1};
    const SuspensionPoint x0{p0, kRoof(p0) / 2};
    ScalingFit fit;
    fit.dimension = 1.1;
    fit.log_c = 0.3;
    FlowOptions opt;
    opt.trials = 1000;
    const auto a = flow_evl(MapKind::lorenz, kParams, kRoof, x0, 100, 2.9, fit, opt);
    const auto b = flow_evl(MapKind::lorenz, kParams, kRoof, x0, 300, 2.9, fit, opt);
    for (std::size_t t = 0; t < a.trials.size(); ++t) {
        CHECK(a.trials[t].phi_T >= a.trials[t].complete_max);
        CHECK(b.trials[t].phi_T >= a.trials[t].phi_T);
        CHECK(a.trials[t].elapsed == doctest::Approx(a.horizon));
    }
    REQUIRE(a.stability.size() == 3);
    CHECK(a.stability_decreasing);
    for (const auto& row : a.stability) {
        CHECK(row.a_term == 0.0);
        CHECK(row.b_term == doctest::Approx(std::log1p(row.epsilon)).epsilon(0.01));
    }
}
