// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "lorenzlab/correlation.hpp"
#include "lorenzlab/errors.hpp"

#include <cmath>

using namespace lorenzlab;

namespace {
const ModelParams kParams;
}

TEST_CASE("doubling map: Fourier oracle for psi(x) = x")
{
    // With the centered branches 2x+1, 2x, 2x-1 on [-1/2, 1/2),
    // C(0) = 1/12 and C(n) = -2^-n / 24 for n >= 1.
    const auto est = corr_estimate(MapKind::doubling, kParams, {}, 12, 10000000, 1);
    CHECK(std::abs(est.rows[0].value - 1.0 / 12.0) <= 3.0 * est.rows[0].sigma + 1e-4);
    for (std::size_t n = 1; n <= 12; ++n) {
        const double exact = -std::ldexp(1.0, -static_cast<int>(n)) / 24.0;
        // sigma comes from 10 members (t with 9 dof), so 4 sigma per lag.
        CHECK(std::abs(est.rows[n].value - exact) <= 4.0 * est.rows[n].sigma);
    }
    // Exact halving per lag from n = 1 on.
    CHECK(est.decaying);
    CHECK(est.rate == doctest::Approx(std::log(2.0)).epsilon(0.05));
}

TEST_CASE("constant observable has zero correlation")
{
    CorrObservable c;
    c.kind = CorrObservable::Kind::constant;
    c.level = 0.7;
    const auto est = corr_estimate(MapKind::lorenz, kParams, c, 20, 10000000, 2);
    for (const auto& row : est.rows) CHECK(row.value == 0.0);
    CHECK_FALSE(est.decaying);
}

TEST_CASE("lorenz bump correlations decay")
{
    CorrObservable b;
    b.kind = CorrObservable::Kind::bump;
    b.center = {0.15, -0.2};
    b.width = 0.15;
    const auto est = corr_estimate(MapKind::lorenz, kParams, b, 60, 10000000, 3);
    CHECK(est.decaying);
    CHECK(est.fit.r2 >= 0.9);
    CHECK(est.fit_last >= 3);
    CHECK(b({0.15, -0.2}) == 1.0);
    CHECK(b({0.5, 0.5}) == 0.0);
}

TEST_CASE("correlation preconditions")
{
    CHECK_THROWS_AS(corr_estimate(MapKind::lorenz, kParams, {}, 201, 10000000, 1), DomainError);
    CHECK_THROWS_AS(corr_estimate(MapKind::lorenz, kParams, {}, 10, 1000000, 1), DomainError);
    CHECK(parse_corr_kind("bump") == CorrObservable::Kind::bump);
    CHECK_THROWS_AS(parse_corr_kind("sine"), ValidationError);
}
