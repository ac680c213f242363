// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/params.hpp"

#include <cmath>
#include <string>
#include <string_view>

namespace lorenzlab {

/// Point of the Poincare section I x I, I = [-1/2, 1/2].
struct SectionPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const SectionPoint&, const SectionPoint&) = default;
};

enum class MapKind {
    lorenz,   ///< geometric Lorenz return map F(x, y) = (T(x), G(x, y))
    baker,    ///< doubling base with half-contracting fiber (preserves Lebesgue)
    doubling, ///< base of the baker map alone; y is carried as 0
};

std::string_view to_string(MapKind kind);
MapKind parse_map_kind(std::string_view name);

/// Lorenz-like map T: theta*x^alpha + b0 for x > 0, -theta*|x|^alpha + b1
/// for x < 0. Throws SingularPointError at 0 and DomainError outside I.
double lorenz_T(const ModelParams& params, double x);

/// T'(x) = theta*alpha*|x|^(alpha-1).
double lorenz_T_prime(const ModelParams& params, double x);

/// G(x, y) = g_kappa*y*|x|^beta + sign(x)*g_c.
double lorenz_G(const ModelParams& params, double x, double y);

SectionPoint lorenz_F(const ModelParams& params, SectionPoint p);

/// Baker-type skew product: x -> 2x reduced into [-1/2, 1/2),
/// y -> y/2 - 1/4 (x < 0) or y/2 + 1/4 (x >= 0).
SectionPoint baker_F(SectionPoint p);

/// Base of baker_F.
double doubling_map(double x);

/// Flow return time h(p) = -(1/lambda1) log|x| + tau0.
double return_time(const ModelParams& params, SectionPoint p);

/// One application of the map of the given kind (checked).
SectionPoint apply_map(MapKind kind, const ModelParams& params, SectionPoint p);

namespace detail {

/// Below this |x|^alpha is flushed to zero; b0 + theta*|x|^alpha then rounds
/// to b0 anyway.
inline constexpr double kTinyAbsX = 1e-300;

/// Exponents and constants of F unpacked for the inner loop.
struct LorenzKernel {
    double alpha;
    double beta;
    double theta;
    double b0;
    double b1;
    double g_kappa;
    double g_c;
    bool beta_is_two;

    explicit LorenzKernel(const ModelParams& p)
        : alpha(p.alpha()), beta(p.beta()), theta(p.theta), b0(p.b0), b1(p.b1), g_kappa(p.g_kappa), g_c(p.g_c),
          beta_is_two(p.beta() == 2.0)
    {
    }

    double T(double x) const
    {
        const double ax = std::fabs(x);
        const double xa = ax < kTinyAbsX ? 0.0 : std::exp(alpha * std::log(ax));
        return x > 0.0 ? theta * xa + b0 : -theta * xa + b1;
    }

    SectionPoint F(SectionPoint p) const
    {
        const double ax = std::fabs(p.x);
        double xa = 0.0;
        double xb = 0.0;
        if (ax >= kTinyAbsX) {
            const double lx = std::log(ax);
            xa = std::exp(alpha * lx);
            xb = beta_is_two ? ax * ax : std::exp(beta * lx);
        }
        if (p.x > 0.0) return {theta * xa + b0, g_kappa * p.y * xb + g_c};
        return {-theta * xa + b1, g_kappa * p.y * xb - g_c};
    }
};

} // namespace detail

} // namespace lorenzlab
