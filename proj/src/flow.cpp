// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/flow.hpp"

#include "lorenzlab/errors.hpp"
#include "lorenzlab/orbit.hpp"

#include <cmath>
#include <limits>

namespace lorenzlab {

double Roof::operator()(SectionPoint p) const
{
    if (scale == 0.0) return tau0;
    if (p.x == 0.0) throw SingularPointError("roof function is infinite on the singular line");
    return -scale * std::log(std::abs(p.x)) + tau0;
}

double suspension_distance(const SuspensionPoint& a, const SuspensionPoint& b, Shape metric)
{
    return std::hypot(shape_distance(a.p, b.p, metric), a.u - b.u);
}

FlowState advance_flow(MapKind kind, const ModelParams& params, const Roof& roof, const SuspensionPoint& q, double t)
{
    if (!(t >= 0.0)) throw DomainError("advance_flow: t must be nonnegative");
    const double h0 = roof(q.p);
    if (!(q.u >= 0.0 && q.u < h0)) throw DomainError("advance_flow: height outside [0, h(p))");
    FlowState state;
    state.point = q;
    Stepper s = make_stepper(kind, params, q.p);
    std::visit(
        [&](auto& st) {
            double remaining = t;
            double h = h0;
            while (state.point.u + remaining >= h) {
                remaining -= h - state.point.u;
                if (!st.step()) {
                    state.truncated = true;
                    return;
                }
                ++state.returns;
                state.point = {st.point(), 0.0};
                h = roof(state.point.p);
            }
            state.point.u += remaining;
        },
        s);
    return state;
}

ReturnTimeEstimate mean_return_time(MapKind kind, const ModelParams& params, const Roof& roof, std::size_t n,
                                    std::uint64_t seed, std::size_t burn_in)
{
    if (n == 0) throw DomainError("mean_return_time: n must be positive");
    ReturnTimeEstimate est;
    for (std::size_t c = 10; c < n; c *= 10) est.checkpoints.push_back(c);
    est.checkpoints.push_back(n);
    Stepper s = random_stepper(kind, params, RandomStream(seed, StreamPurpose::start, 0), burn_in);
    double sum = 0.0, comp = 0.0;
    std::size_t next = 0;
    const auto run = std::visit(
        [&](auto& st) {
            return for_each_point(st, n, [&](std::size_t i, SectionPoint p) {
                const double y = roof(p) - comp;
                const double t = sum + y;
                comp = (t - sum) - y;
                sum = t;
                if (i + 1 == est.checkpoints[next]) {
                    est.running.push_back(sum / static_cast<double>(i + 1));
                    ++next;
                }
            });
        },
        s);
    est.truncated = run.truncated;
    if (run.points == 0) throw EstimationError("mean_return_time: empty orbit");
    est.checkpoints.resize(est.running.size());
    est.mean = sum / static_cast<double>(run.points);
    return est;
}

double segment_min_distance(SectionPoint p, double lo, double hi, const SuspensionPoint& x0, Shape metric)
{
    const double base = shape_distance(p, x0.p, metric);
    if (x0.u >= lo && x0.u < hi) return base;
    const double gap = x0.u < lo ? lo - x0.u : x0.u - hi;
    return std::hypot(base, gap);
}

double segment_max_phi(const Roof& roof, SectionPoint p, const SuspensionPoint& x0, Shape metric)
{
    return Observable::value_at_distance(segment_min_distance(p, 0.0, roof(p), x0, metric));
}

FlowMaxReport flow_evl(MapKind kind, const ModelParams& params, const Roof& roof, const SuspensionPoint& x0,
                       std::size_t N, double hbar, const ScalingFit& fit, const FlowOptions& options,
                       const std::vector<double>& stability_eps)
{
    if (N == 0 || !(hbar > 0.0)) throw DomainError("flow_evl: need N > 0 and hbar > 0");
    if (options.trials < 1000) throw DomainError("flow_evl: need at least 1e3 trials");

    FlowMaxReport report;
    report.N = N;
    report.hbar = hbar;
    report.horizon = static_cast<double>(N) * hbar;
    report.a_N = fit.a();
    report.b_N = fit.b(static_cast<double>(N));
    const double T = report.horizon;
    constexpr double inf = std::numeric_limits<double>::infinity();

    report.trials = map_members<FlowTrial>(options.exec, options.trials, [&](std::size_t trial) {
        FlowTrial out;
        Stepper s = random_stepper(kind, params, RandomStream(options.seed, StreamPurpose::trial, trial), options.burn_in);
        RandomStream height(options.seed, StreamPurpose::flow_start, trial);
        std::visit(
            [&](auto& st) {
                double dist_T = inf, dist_N = inf, dist_complete = inf;
                SectionPoint p = st.point();
                double h = roof(p);
                double lo = options.zero_start_height ? 0.0 : height.uniform() * h;
                double elapsed = 0.0;
                for (std::size_t k = 0;; ++k) {
                    if (k < N) dist_N = std::min(dist_N, segment_min_distance(p, 0.0, h, x0));
                    if (elapsed < T) {
                        const double hi = std::min(h, lo + (T - elapsed));
                        dist_T = std::min(dist_T, segment_min_distance(p, lo, hi, x0));
                        if (lo == 0.0 && hi == h) dist_complete = std::min(dist_complete, segment_min_distance(p, 0.0, h, x0));
                        elapsed += hi - lo;
                        if (hi < h) elapsed = T;
                    }
                    if (k + 1 >= N && elapsed >= T) break;
                    if (!st.step()) {
                        out.truncated = true;
                        break;
                    }
                    ++out.returns;
                    p = st.point();
                    h = roof(p);
                    lo = 0.0;
                }
                out.elapsed = elapsed;
                out.phi_T = Observable::value_at_distance(dist_T);
                out.Phi_N = Observable::value_at_distance(dist_N);
                out.complete_max = dist_complete == inf ? -inf : Observable::value_at_distance(dist_complete);
            },
            s);
        return out;
    });

    std::vector<double> phi_T, Phi_N;
    for (const auto& t : report.trials) {
        if (t.truncated) {
            ++report.excluded;
            continue;
        }
        phi_T.push_back(t.phi_T);
        Phi_N.push_back(t.Phi_N);
    }
    report.phi_T_ks = gumbel_ks(phi_T, report.a_N, report.b_N);
    report.Phi_N_ks = gumbel_ks(Phi_N, report.a_N, report.b_N);

    const double n = static_cast<double>(N);
    report.stability_decreasing = true;
    for (double eps : stability_eps) {
        StabilityRow row;
        row.epsilon = eps;
        const double n2 = std::ceil(n * (1.0 + eps));
        row.b_term = fit.a() * std::abs(fit.b(n2) - fit.b(n));
        row.a_term = std::abs(1.0 - fit.a() / fit.a());
        if (!report.stability.empty()) {
            const auto& prev = report.stability.back();
            if (!(row.b_term < prev.b_term && row.a_term <= prev.a_term)) report.stability_decreasing = false;
        }
        report.stability.push_back(row);
    }
    return report;
}

} // namespace lorenzlab
