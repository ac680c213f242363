// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/maps.hpp"

#include "lorenzlab/errors.hpp"

#include <string>

namespace lorenzlab {

namespace {

void check_nonsingular(double x, const char* what)
{
    if (std::isnan(x) || std::fabs(x) > 0.5) {
        throw DomainError(std::string(what) + ": x = " + std::to_string(x) + " outside I = [-1/2, 1/2]");
    }
    if (x == 0.0) throw SingularPointError(std::string(what) + ": undefined on the singular line x = 0");
}

} // namespace

std::string_view to_string(MapKind kind)
{
    switch (kind) {
    case MapKind::lorenz: return "lorenz";
    case MapKind::baker: return "baker";
    case MapKind::doubling: return "doubling";
    }
    return "?";
}

MapKind parse_map_kind(std::string_view name)
{
    if (name == "lorenz") return MapKind::lorenz;
    if (name == "baker") return MapKind::baker;
    if (name == "doubling") return MapKind::doubling;
    throw ValidationError("unknown system '" + std::string(name) + "' (expected lorenz, baker or doubling)");
}

double lorenz_T(const ModelParams& params, double x)
{
    check_nonsingular(x, "lorenz_T");
    return detail::LorenzKernel(params).T(x);
}

double lorenz_T_prime(const ModelParams& params, double x)
{
    check_nonsingular(x, "lorenz_T_prime");
    const double a = params.alpha();
    return params.theta * a * std::exp((a - 1.0) * std::log(std::fabs(x)));
}

double lorenz_G(const ModelParams& params, double x, double y)
{
    check_nonsingular(x, "lorenz_G");
    return detail::LorenzKernel(params).F({x, y}).y;
}

SectionPoint lorenz_F(const ModelParams& params, SectionPoint p)
{
    check_nonsingular(p.x, "lorenz_F");
    if (std::isnan(p.y) || std::fabs(p.y) > 0.5) throw DomainError("lorenz_F: y outside I");
    return detail::LorenzKernel(params).F(p);
}

double doubling_map(double x)
{
    if (std::isnan(x) || std::fabs(x) > 0.5) throw DomainError("doubling_map: x outside I");
    double t = 2.0 * x;
    if (t >= 0.5) t -= 1.0;
    else if (t < -0.5) t += 1.0;
    return t;
}

SectionPoint baker_F(SectionPoint p)
{
    if (std::isnan(p.y) || std::fabs(p.y) > 0.5) throw DomainError("baker_F: y outside I");
    const double x = doubling_map(p.x);
    const double y = 0.5 * p.y + (p.x < 0.0 ? -0.25 : 0.25);
    return {x, y};
}

double return_time(const ModelParams& params, SectionPoint p)
{
    check_nonsingular(p.x, "return_time");
    return -std::log(std::fabs(p.x)) / params.lambda1 + params.tau0;
}

SectionPoint apply_map(MapKind kind, const ModelParams& params, SectionPoint p)
{
    switch (kind) {
    case MapKind::lorenz: return lorenz_F(params, p);
    case MapKind::baker: return baker_F(p);
    case MapKind::doubling: return {doubling_map(p.x), 0.0};
    }
    throw ValidationError("apply_map: unknown map kind");
}

} // namespace lorenzlab
