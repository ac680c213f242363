// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/orbit.hpp"

#include "lorenzlab/errors.hpp"

#include <cmath>

namespace lorenzlab {

namespace {

std::uint64_t window_from_x(double x)
{
    if (std::isnan(x) || std::fabs(x) > 0.5) throw DomainError("baker start: x outside I");
    if (x >= 0.0) {
        if (x == 0.5) return std::uint64_t{1} << 63; // 1/2 is identified with -1/2
        return static_cast<std::uint64_t>(std::ldexp(x, 64));
    }
    const auto m = static_cast<std::uint64_t>(std::ldexp(-x, 64));
    return std::uint64_t{0} - m;
}

} // namespace

BakerStepper::BakerStepper(SectionPoint start, bool with_fiber)
    : bits_(window_from_x(start.x)), y_(with_fiber ? start.y : 0.0), with_fiber_(with_fiber)
{
    if (std::isnan(start.y) || std::fabs(start.y) > 0.5) throw DomainError("baker start: y outside I");
    refresh();
}

BakerStepper::BakerStepper(std::uint64_t bits, double y, bool with_fiber, RandomStream tail)
    : bits_(bits), y_(with_fiber ? y : 0.0), with_fiber_(with_fiber), tail_(std::move(tail))
{
    refresh();
}

void BakerStepper::refresh()
{
    double x = 0.0;
    if ((bits_ >> 63) == 0) {
        x = std::ldexp(static_cast<double>(bits_), -64);
        if (x >= 0.5) x = std::nextafter(0.5, 0.0);
    }
    else {
        x = -std::ldexp(static_cast<double>(std::uint64_t{0} - bits_), -64);
    }
    p_ = {x, y_};
}

Stepper make_stepper(MapKind kind, const ModelParams& params, SectionPoint start)
{
    switch (kind) {
    case MapKind::lorenz:
        if (start.x == 0.0) throw SingularPointError("orbit start on the singular line x = 0");
        if (std::isnan(start.x) || std::fabs(start.x) > 0.5 || std::isnan(start.y) || std::fabs(start.y) > 0.5) {
            throw DomainError("orbit start outside I x I");
        }
        return LorenzStepper(params, start);
    case MapKind::baker: return BakerStepper(start, true);
    case MapKind::doubling: return BakerStepper(start, false);
    }
    throw ValidationError("make_stepper: unknown map kind");
}

Stepper random_stepper(MapKind kind, const ModelParams& params, RandomStream rng, std::size_t burn_in)
{
    if (kind == MapKind::lorenz) {
        for (;;) {
            SectionPoint p{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
            if (p.x == 0.0) continue;
            LorenzStepper s(params, p);
            if (skip(s, burn_in)) return s;
        }
    }
    const std::uint64_t bits = rng.next_u64();
    const double y = kind == MapKind::baker ? rng.uniform(-0.5, 0.5) : 0.0;
    BakerStepper s(bits, y, kind == MapKind::baker, std::move(rng));
    skip(s, burn_in);
    return s;
}

std::optional<SectionPoint> OrbitStream::next()
{
    if (remaining_ == 0 || truncated_) return std::nullopt;
    if (produced_ > 0) {
        const bool ok = std::visit([](auto& s) { return s.step(); }, stepper_);
        if (!ok) {
            truncated_ = true;
            return std::nullopt;
        }
    }
    --remaining_;
    ++produced_;
    return std::visit([](auto& s) { return s.point(); }, stepper_);
}

OrbitStream iterate_orbit(MapKind kind, const ModelParams& params, SectionPoint p0, std::size_t n)
{
    if (n == 0) throw DomainError("iterate_orbit: n must be >= 1");
    return OrbitStream(make_stepper(kind, params, p0), n);
}

} // namespace lorenzlab
