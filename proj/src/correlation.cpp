// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/correlation.hpp"

#include "lorenzlab/errors.hpp"
#include "lorenzlab/orbit.hpp"

#include <cmath>

namespace lorenzlab {

double CorrObservable::operator()(SectionPoint p) const
{
    switch (kind) {
    case Kind::x: return p.x;
    case Kind::y: return p.y;
    case Kind::constant: return level;
    case Kind::bump: {
        const double dx = p.x - center.x, dy = p.y - center.y;
        const double s = (dx * dx + dy * dy) / (width * width);
        return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
    }
    }
    return 0.0;
}

std::string_view to_string(CorrObservable::Kind kind)
{
    switch (kind) {
    case CorrObservable::Kind::x: return "x";
    case CorrObservable::Kind::y: return "y";
    case CorrObservable::Kind::constant: return "constant";
    case CorrObservable::Kind::bump: return "bump";
    }
    return "?";
}

CorrObservable::Kind parse_corr_kind(std::string_view name)
{
    for (auto k : {CorrObservable::Kind::x, CorrObservable::Kind::y, CorrObservable::Kind::constant,
                   CorrObservable::Kind::bump}) {
        if (name == to_string(k)) return k;
    }
    throw ValidationError("unknown observable '" + std::string(name) + "' (expected x, y, constant or bump)");
}

namespace {

struct MemberSums {
    double sum = 0.0;
    std::size_t count = 0;
    std::vector<double> products; ///< per lag
    std::vector<std::size_t> pairs;
    bool truncated = false;
};

/// Runs one member orbit, calling fn(value) per point.
template <class Fn>
bool run_member(MapKind kind, const ModelParams& params, std::uint64_t seed, std::size_t member, std::size_t length,
                Fn&& fn)
{
    Stepper s = random_stepper(kind, params, RandomStream(seed, StreamPurpose::member, member), 1000);
    return !std::visit([&](auto& st) { return for_each_point(st, length, [&](std::size_t, SectionPoint p) { fn(p); }); }, s)
                .truncated;
}

} // namespace

CorrEstimate corr_estimate(MapKind kind, const ModelParams& params, const CorrObservable& psi, std::size_t max_lag,
                           std::size_t length, std::uint64_t seed, std::size_t members, Exec exec)
{
    if (max_lag > 200) throw DomainError("corr_estimate: lags must be <= 200");
    if (length < 10000000) throw DomainError("corr_estimate: orbit length must be >= 1e7");
    if (members < 2 || length / members <= max_lag) throw DomainError("corr_estimate: bad member split");
    const std::size_t per = length / members;

    // Pass 1: the mean.
    auto firsts = map_members<MemberSums>(exec, members, [&](std::size_t m) {
        MemberSums s;
        double comp = 0.0;
        s.truncated = !run_member(kind, params, seed, m, per, [&](SectionPoint p) {
            const double y = psi(p) - comp;
            const double t = s.sum + y;
            comp = (t - s.sum) - y;
            s.sum = t;
            ++s.count;
        });
        return s;
    });
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& f : firsts) {
        total += f.sum;
        count += f.count;
    }
    const double mean = total / static_cast<double>(count);

    // Pass 2: centered lag products over the same orbits.
    auto seconds = map_members<MemberSums>(exec, members, [&](std::size_t m) {
        MemberSums s;
        s.products.assign(max_lag + 1, 0.0);
        s.pairs.assign(max_lag + 1, 0);
        std::vector<double> ring(max_lag + 1, 0.0);
        std::size_t t = 0;
        run_member(kind, params, seed, m, per, [&](SectionPoint p) {
            const double v = psi(p) - mean;
            ring[t % (max_lag + 1)] = v;
            const std::size_t reach = std::min(t, max_lag);
            for (std::size_t lag = 0; lag <= reach; ++lag) {
                s.products[lag] += v * ring[(t - lag) % (max_lag + 1)];
                ++s.pairs[lag];
            }
            ++t;
        });
        return s;
    });

    CorrEstimate est;
    est.mean = mean;
    std::size_t truncated = 0;
    for (const auto& f : firsts) truncated += f.truncated ? 1 : 0;
    if (truncated > 0) est.warnings.push_back(std::to_string(truncated) + " member orbits truncated");
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double prod = 0.0;
        std::size_t pairs = 0;
        std::vector<double> per_member;
        for (const auto& s : seconds) {
            prod += s.products[lag];
            pairs += s.pairs[lag];
            if (s.pairs[lag] > 0) per_member.push_back(s.products[lag] / static_cast<double>(s.pairs[lag]));
        }
        CorrRow row;
        row.lag = lag;
        row.value = pairs > 0 ? prod / static_cast<double>(pairs) : 0.0;
        row.sigma = per_member.size() > 1 ? stats::stddev(per_member) / std::sqrt(static_cast<double>(per_member.size())) : 0.0;
        est.rows.push_back(row);
    }
    est.variance = est.rows[0].value;
    est.noise_floor = 3.0 * est.variance / std::sqrt(static_cast<double>(count));

    fit_envelope(est);
    return est;
}

void fit_envelope(CorrEstimate& est)
{
    const std::size_t max_lag = est.rows.empty() ? 0 : est.rows.size() - 1;
    // Fit window: lags 1.. while |C(n)| stays above the noise floor.
    std::size_t last = 0;
    for (std::size_t lag = 1; lag <= max_lag && std::abs(est.rows[lag].value) >= est.noise_floor &&
                                 est.rows[lag].value != 0.0;
         ++lag) {
        last = lag;
    }
    est.fit_last = last;
    if (last < 3) {
        est.warnings.push_back("fewer than 3 lags above the noise floor; no decay rate reported");
        return;
    }
    std::vector<double> xs, ys;
    for (std::size_t lag = 1; lag <= last; ++lag) {
        xs.push_back(static_cast<double>(lag));
        ys.push_back(std::log(std::abs(est.rows[lag].value)));
    }
    est.fit = stats::linear_fit(xs, ys);
    est.decaying = est.fit.slope < 0.0;
    if (est.decaying) est.rate = -est.fit.slope;
    else est.warnings.push_back("correlation envelope is not decaying; no rate reported");
}

} // namespace lorenzlab
