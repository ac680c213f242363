// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "lorenzlab/parallel.hpp"
#include "lorenzlab/rng.hpp"
#include "lorenzlab/stats.hpp"

#include <set>
#include <stdexcept>
#include <vector>

using namespace lorenzlab;

TEST_CASE("philox4x32-10 known-answer vectors")
{
    // Random123 kat_vectors.
    auto zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    auto ones = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ones == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    auto pi = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(pi == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and keyed by (seed, stream)")
{
    RandomStream a(1, 2), b(1, 2), c(1, 3), d(2, 2);
    std::vector<std::uint64_t> va, vb, vc, vd;
    for (int i = 0; i < 100; ++i) {
        va.push_back(a());
        vb.push_back(b());
        vc.push_back(c());
        vd.push_back(d());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
    CHECK(stream_key(StreamPurpose::trial, 0) != stream_key(StreamPurpose::member, 0));
}

TEST_CASE("uniform variates")
{
    RandomStream rng(123, 0);
    std::vector<double> u(100000);
    for (auto& v : u) {
        v = rng.uniform();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
    }
    CHECK(stats::ks_distance(u, [](double x) { return x; }) < 0.01);
    for (int i = 0; i < 10000; ++i) {
        const double p = rng.uniform_pos();
        REQUIRE(p > 0.0);
        REQUIRE(p <= 1.0);
        REQUIRE(rng.below(7) < 7);
    }
}

TEST_CASE("parallel and serial member loops agree")
{
    auto f = [](std::size_t i) {
        RandomStream r(99, StreamPurpose::member, i);
        double s = 0.0;
        for (int k = 0; k < 1000; ++k) s += r.uniform();
        return s;
    };
    set_worker_count(3);
    const auto par = map_members<double>(Exec::parallel, 64, f);
    set_worker_count(0);
    const auto ser = map_members<double>(Exec::serial, 64, f);
    CHECK(par == ser);
}

TEST_CASE("exceptions inside parallel members propagate")
{
    CHECK_THROWS_AS(for_each_member(Exec::parallel, 8,
                                    [](std::size_t i) {
                                        if (i == 5) throw std::runtime_error("boom");
                                    }),
                    std::runtime_error);
}
