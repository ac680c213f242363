// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/params.hpp"

#include "lorenzlab/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lorenzlab {

namespace {

constexpr double kTol = 1e-12;

} // namespace

std::vector<std::string> ModelParams::violations() const
{
    std::vector<std::string> out;
    const double fields[] = {lambda1, lambda2, lambda3, theta, b0, b1, g_kappa, g_c, tau0};
    for (double f : fields) {
        if (!std::isfinite(f)) {
            out.emplace_back("all parameters must be finite");
            return out;
        }
    }

    if (!(lambda1 > 0.0)) out.emplace_back("lambda1 > 0");
    if (!(lambda1 / 2.0 <= -lambda3)) out.emplace_back("lambda1/2 <= -lambda3");
    if (!(-lambda3 < lambda1)) out.emplace_back("-lambda3 < lambda1");
    if (!(lambda1 < -lambda2)) out.emplace_back("lambda1 < -lambda2");
    if (!out.empty()) return out;

    const double a = alpha();
    if (!(theta > 0.0)) out.emplace_back("theta > 0");
    if (!(theta * std::pow(0.5, a) < 1.0)) out.emplace_back("theta*(1/2)^alpha < 1");
    if (!(theta * a * std::pow(2.0, 1.0 - a) > 1.0)) out.emplace_back("theta*alpha*2^(1-alpha) > 1");

    // Lateral limits T(0+) = b0 and T(0-) = b1 must be the endpoints of I.
    if (std::abs(b0 + 0.5) > kTol) out.emplace_back("T(0+) = b0 = -1/2");
    if (std::abs(b1 - 0.5) > kTol) out.emplace_back("T(0-) = b1 = +1/2");

    // Fiber images: G(x>0, I) = g_c +- g_kappa*2^(-beta-1), mirrored for x<0.
    const double half_width = g_kappa * std::pow(2.0, -beta() - 1.0);
    if (!(g_kappa > 0.0)) out.emplace_back("g_kappa > 0");
    if (!(g_kappa * std::pow(0.5, beta()) < 1.0)) out.emplace_back("g_kappa*(1/2)^beta < 1");
    if (!(std::abs(g_c) + half_width <= 0.5)) out.emplace_back("|g_c| + g_kappa*2^(-beta-1) <= 1/2");
    if (!(std::abs(g_c) > half_width)) out.emplace_back("|g_c| > g_kappa*2^(-beta-1) (disjoint branch images)");

    if (!(tau0 >= 0.0)) out.emplace_back("tau0 >= 0");
    return out;
}

void ModelParams::validate() const
{
    const auto bad = violations();
    if (bad.empty()) return;
    std::ostringstream os;
    os << "invalid model parameters: violated";
    for (std::size_t i = 0; i < bad.size(); ++i) os << (i ? "; " : " ") << bad[i];
    throw ValidationError(os.str());
}

std::uint64_t ModelParams::hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const double fields[] = {lambda1, lambda2, lambda3, theta, b0, b1, g_kappa, g_c, tau0};
    for (double f : fields) {
        auto bits = std::bit_cast<std::uint64_t>(f);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string to_hex(std::uint64_t value)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

} // namespace lorenzlab
