// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/maps.hpp"
#include "lorenzlab/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>

namespace lorenzlab {

/// Steppers hold the current point of one orbit. step() applies the map once
/// and returns false when the new point is singular (the orbit must stop).
class LorenzStepper {
public:
    LorenzStepper(const ModelParams& params, SectionPoint start) : kernel_(params), p_(start) {}

    SectionPoint point() const { return p_; }

    bool step()
    {
        p_ = kernel_.F(p_);
        return p_.x != 0.0;
    }

private:
    detail::LorenzKernel kernel_;
    SectionPoint p_;
};

/// Exact orbit engine for the baker and doubling maps.
///
/// The base coordinate is kept as the top 64 bits of the binary expansion of
/// t = x mod 1; doubling shifts that window left by one bit and appends the
/// next bit of the expansion. For an explicitly given start point the tail
/// is all zeros (the true orbit of that dyadic rational, identical to
/// repeated baker_F); for random starts the tail is drawn from a random
/// stream, which is the orbit of a Lebesgue-random real. Plain doubling in
/// double precision would instead collapse to 0 after ~53 steps.
class BakerStepper {
public:
    /// Zero tail bits.
    BakerStepper(SectionPoint start, bool with_fiber);

    /// Window `bits` is t = x mod 1 scaled by 2^64; tail from `tail`.
    BakerStepper(std::uint64_t bits, double y, bool with_fiber, RandomStream tail);

    SectionPoint point() const { return p_; }

    bool step()
    {
        const bool negative = (bits_ >> 63) != 0;
        if (with_fiber_) y_ = 0.5 * y_ + (negative ? -0.25 : 0.25);
        bits_ = (bits_ << 1) | next_tail_bit();
        refresh();
        return true;
    }

    std::uint64_t bits() const { return bits_; }

private:
    std::uint64_t next_tail_bit()
    {
        if (!tail_) return 0;
        if (tail_left_ == 0) {
            tail_buffer_ = tail_->next_u64();
            tail_left_ = 64;
        }
        const std::uint64_t bit = tail_buffer_ & 1U;
        tail_buffer_ >>= 1;
        --tail_left_;
        return bit;
    }

    void refresh();

    std::uint64_t bits_ = 0;
    double y_ = 0.0;
    bool with_fiber_ = true;
    std::optional<RandomStream> tail_;
    std::uint64_t tail_buffer_ = 0;
    int tail_left_ = 0;
    SectionPoint p_;
};

using Stepper = std::variant<LorenzStepper, BakerStepper>;

/// Stepper at an explicit start point (zero tail bits for baker/doubling).
Stepper make_stepper(MapKind kind, const ModelParams& params, SectionPoint start);

/// Stepper from a random start, advanced by `burn_in` steps. The start is
/// uniform on I x I (y = 0 for doubling); baker/doubling tails continue the
/// same stream. Singular hits during burn-in restart from a fresh draw.
Stepper random_stepper(MapKind kind, const ModelParams& params, RandomStream rng, std::size_t burn_in);

template <class Fn>
decltype(auto) visit_stepper(Stepper& s, Fn&& fn)
{
    return std::visit(std::forward<Fn>(fn), s);
}

struct OrbitRun {
    std::size_t points = 0; ///< number of points visited
    bool truncated = false; ///< stopped early on the singular line
};

/// Visits the current point and the next n-1 iterates, calling
/// fn(index, point). Returns early (truncated) on a singular hit; the
/// singular point itself is not visited.
template <class S, class Fn>
OrbitRun for_each_point(S& stepper, std::size_t n, Fn&& fn)
{
    OrbitRun run;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && !stepper.step()) {
            run.truncated = true;
            return run;
        }
        fn(i, stepper.point());
        ++run.points;
    }
    return run;
}

/// Advances a stepper by n steps; false on a singular hit.
template <class S>
bool skip(S& stepper, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        if (!stepper.step()) return false;
    }
    return true;
}

/// Pull-style orbit stream: p0, F(p0), ..., F^(n-1)(p0).
class OrbitStream {
public:
    OrbitStream(Stepper stepper, std::size_t n) : stepper_(std::move(stepper)), remaining_(n) {}

    /// Next point, or nullopt when exhausted or truncated.
    std::optional<SectionPoint> next();

    bool truncated() const { return truncated_; }
    std::size_t produced() const { return produced_; }

private:
    Stepper stepper_;
    std::size_t remaining_;
    std::size_t produced_ = 0;
    bool truncated_ = false;
};

/// Orbit of p0 under the map of the given kind. Throws SingularPointError
/// when p0 itself is singular for the Lorenz map.
OrbitStream iterate_orbit(MapKind kind, const ModelParams& params, SectionPoint p0, std::size_t n);

} // namespace lorenzlab
