// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/measure.hpp"
#include "lorenzlab/orbit.hpp"

#include <variant>

namespace lorenzlab {

/// Where ensemble orbits come from: a map started at random points and
/// burned in, or i.i.d. draws from an empirical measure. The second kind is
/// the independence control every orbit statistic can be rerun against.
class OrbitSource {
public:
    static OrbitSource dynamics(MapKind kind, const ModelParams& params, std::size_t burn_in = 1000)
    {
        OrbitSource s;
        s.kind_ = kind;
        s.params_ = params;
        s.burn_in_ = burn_in;
        return s;
    }

    /// The measure must outlive the source.
    static OrbitSource iid(const EmpiricalMeasure& m)
    {
        OrbitSource s;
        s.kind_ = m.meta().system;
        s.iid_ = &m;
        return s;
    }

    bool is_iid() const { return iid_ != nullptr; }
    MapKind kind() const { return kind_; }
    const ModelParams& params() const { return params_; }
    std::size_t burn_in() const { return burn_in_; }

    /// Calls fn(stepper) with a concrete stepper type, so inner loops are
    /// compiled once per kind without per-step dispatch.
    template <class Fn>
    decltype(auto) with_stepper(RandomStream rng, Fn&& fn) const
    {
        if (iid_) {
            ResampleStepper s(*iid_, std::move(rng));
            return fn(s);
        }
        Stepper s = random_stepper(kind_, params_, std::move(rng), burn_in_);
        return std::visit(std::forward<Fn>(fn), s);
    }

private:
    MapKind kind_ = MapKind::lorenz;
    ModelParams params_;
    std::size_t burn_in_ = 1000;
    const EmpiricalMeasure* iid_ = nullptr;
};

} // namespace lorenzlab
