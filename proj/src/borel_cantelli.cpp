// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/borel_cantelli.hpp"

#include "lorenzlab/errors.hpp"
#include "lorenzlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lorenzlab {

TargetSequence TargetSequence::full_space(std::size_t n)
{
    TargetSequence t;
    t.shape = Shape::square;
    t.gamma1 = 0.0;
    t.C = 1.0;
    t.radii.assign(n, 1.0);
    t.masses.assign(n, 1.0);
    t.cumulative.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.cumulative[i] = static_cast<double>(i + 1);
    return t;
}

double schedule_sum(double C, double gamma1, std::size_t n)
{
    double sum = 0.0;
    for (std::size_t i = n; i >= 1; --i) sum += C * std::pow(static_cast<double>(i), -gamma1);
    return sum;
}

TargetSequence build_targets(const EmpiricalMeasure& m, SectionPoint center, Shape shape, double gamma1, std::size_t n,
                             const TargetOptions& options)
{
    if (!(gamma1 > 0.0 && gamma1 <= 1.0)) throw DomainError("build_targets: gamma1 must lie in (0, 1]");
    if (n < 1000) throw DomainError("build_targets: N must be >= 1e3");
    if (!(options.C > 0.0 && options.C < 1.0)) throw DomainError("build_targets: C must lie in (0, 1)");

    TargetSequence t;
    t.center = center;
    t.shape = shape;
    t.gamma1 = gamma1;
    t.C = options.C;

    const double total = static_cast<double>(m.size());
    auto samples_for = [&](std::size_t i) {
        return static_cast<std::size_t>(std::ceil(options.C * std::pow(static_cast<double>(i), -gamma1) * total));
    };
    const std::size_t k1 = samples_for(1);
    if (k1 < kMinBallSamples) throw ResolutionError("build_targets: initial mass C rests on fewer than 50 samples");
    const auto profile = m.nearest(center, shape, k1);
    const auto d = profile.distances();

    t.radii.reserve(n);
    t.masses.reserve(n);
    t.cumulative.reserve(n);
    double cumulative = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t k = samples_for(i);
        if (k < kMinBallSamples) {
            std::ostringstream msg;
            msg << "target mass falls below the 50-sample floor at i = " << i << "; N truncated from " << n << " to "
                << i - 1;
            t.warnings.push_back(msg.str());
            break;
        }
        const double r = d[k - 1];
        const auto inside = static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), r) - d.begin());
        const double mass = static_cast<double>(inside) / total;
        t.radii.push_back(r);
        t.masses.push_back(mass);
        cumulative += mass;
        t.cumulative.push_back(cumulative);
        if (i > 1) t.side_condition = std::max(t.side_condition, std::log(static_cast<double>(i)) * 2.0 * r);
    }

    const double planned = schedule_sum(options.C, gamma1, n);
    if (planned < options.expectation_floor) {
        std::ostringstream msg;
        msg << "E_N too small (" << planned << " < " << options.expectation_floor << ")";
        if (gamma1 > 0.6) msg << "; suggest gamma1 = 0.6";
        t.warnings.push_back(msg.str());
    }
    return t;
}

std::vector<std::size_t> log_checkpoints(std::size_t n, std::size_t first)
{
    std::vector<std::size_t> out;
    for (std::size_t c = first; c < n; c *= 10) out.push_back(c);
    out.push_back(n);
    return out;
}

std::vector<double> SbcReport::terminal_ratios() const
{
    std::vector<double> out;
    const double e = expected.back();
    for (const auto& m : members) {
        if (!m.truncated) out.push_back(static_cast<double>(m.hits.back()) / e);
    }
    return out;
}

SbcReport run_sbc(const OrbitSource& source, const TargetSequence& targets, std::size_t n, const SbcOptions& options)
{
    if (n == 0 || n > targets.size()) throw DomainError("run_sbc: n must lie in [1, N] of the target sequence");
    if (options.ensemble == 0) throw DomainError("run_sbc: empty ensemble");

    SbcReport report;
    report.n = n;
    report.checkpoints = options.checkpoints.empty() ? log_checkpoints(n) : options.checkpoints;
    if (!std::is_sorted(report.checkpoints.begin(), report.checkpoints.end()) || report.checkpoints.back() != n ||
        report.checkpoints.front() == 0) {
        throw DomainError("run_sbc: checkpoints must increase and end at n");
    }
    for (auto c : report.checkpoints) report.expected.push_back(targets.expected(c));

    const auto& radii = targets.radii;
    const SectionPoint center = targets.center;
    const Shape shape = targets.shape;
    const auto& checkpoints = report.checkpoints;

    report.members = map_members<SbcMember>(options.exec, options.ensemble, [&](std::size_t member) {
        SbcMember out;
        out.member = member;
        out.hits.reserve(checkpoints.size());
        source.with_stepper(RandomStream(options.seed, StreamPurpose::member, member), [&](auto& s) {
            std::uint64_t hits = 0;
            std::size_t next = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (!s.step()) {
                    out.truncated = true;
                    return;
                }
                if (shape_distance(s.point(), center, shape) <= radii[j - 1]) {
                    ++hits;
                    if (options.record_hits) out.hit_times.push_back(j);
                }
                if (j == checkpoints[next]) {
                    out.hits.push_back(hits);
                    ++next;
                }
            }
        });
        return out;
    });

    for (const auto& m : report.members) report.excluded += m.truncated ? 1 : 0;
    if (report.excluded == report.members.size()) throw EstimationError("run_sbc: every orbit was truncated");
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        std::vector<double> ratios;
        for (const auto& m : report.members) {
            if (!m.truncated) ratios.push_back(static_cast<double>(m.hits[c]) / report.expected[c]);
        }
        report.mean_ratio.push_back(stats::mean(ratios));
        report.std_ratio.push_back(stats::stddev(ratios));
    }
    return report;
}

namespace {

/// Per-member accumulators of sp_diagnostic, indexed [sampled index][lag].
struct SpCounts {
    std::vector<std::vector<std::uint64_t>> joint;
    std::vector<std::vector<std::uint64_t>> marginal; ///< visits to A_{i+lag}
    std::uint64_t length = 0;
    bool truncated = false;
};

} // namespace

SpReport sp_diagnostic(const OrbitSource& source, const TargetSequence& targets, std::size_t n,
                       const SpOptions& options)
{
    const std::size_t window = options.window;
    if (window == 0 || window > 1000) throw DomainError("sp_diagnostic: window must lie in [1, 1000]");
    if (n < 2 || n + window > targets.size()) {
        throw DomainError("sp_diagnostic: need n + window <= N of the target sequence");
    }
    if (options.members < 2) throw DomainError("sp_diagnostic: need at least two members for an error bar");

    SpReport report;
    report.n = n;
    report.window = window;

    // Log-spaced target indices in [1, n], each standing for the indices
    // closest to it (weights sum to n).
    std::size_t count = std::max<std::size_t>(2, options.indices);
    if (count * (window + 1) > options.pairs_budget) {
        count = std::max<std::size_t>(1, options.pairs_budget / (window + 1));
        report.partial = true;
        report.warnings.push_back("pairs budget exhausted; sampled index set reduced to " + std::to_string(count));
    }
    std::vector<std::size_t> idx;
    for (std::size_t s = 0; s < count; ++s) {
        const double f = count == 1 ? 0.0 : static_cast<double>(s) / static_cast<double>(count - 1);
        const auto i = static_cast<std::size_t>(std::llround(std::exp(f * std::log(static_cast<double>(n)))));
        if (idx.empty() || i > idx.back()) idx.push_back(i);
    }
    std::vector<double> weight(idx.size());
    for (std::size_t s = 0; s < idx.size(); ++s) {
        const double lo = s == 0 ? 0.5 : 0.5 * static_cast<double>(idx[s - 1] + idx[s]);
        const double hi = s + 1 == idx.size() ? static_cast<double>(n) + 0.5 : 0.5 * static_cast<double>(idx[s] + idx[s + 1]);
        weight[s] = hi - lo;
    }
    const std::size_t S = idx.size();
    const auto& radii = targets.radii;
    // Radius of A_{idx[s] + lag}.
    auto radius = [&](std::size_t s, std::size_t lag) { return radii[idx[s] + lag - 1]; };

    const auto members = map_members<SpCounts>(options.exec, options.members, [&](std::size_t member) {
        SpCounts c;
        c.joint.assign(S, std::vector<std::uint64_t>(window + 1, 0));
        c.marginal.assign(S, std::vector<std::uint64_t>(window + 1, 0));
        // Active visits: (sampled index, time of visit to A_i).
        std::vector<std::pair<std::size_t, std::uint64_t>> active;
        source.with_stepper(RandomStream(options.seed, StreamPurpose::member, member), [&](auto& st) {
            for (std::uint64_t t = 0; t < options.orbit_length; ++t) {
                if (t > 0 && !st.step()) {
                    c.truncated = true;
                    return;
                }
                ++c.length;
                const double d = shape_distance(st.point(), targets.center, targets.shape);
                // Joint hits for visits still inside the window.
                std::size_t keep = 0;
                for (const auto& a : active) {
                    const std::size_t lag = static_cast<std::size_t>(t - a.second);
                    if (lag > window) continue;
                    if (d <= radius(a.first, lag)) ++c.joint[a.first][lag];
                    active[keep++] = a;
                }
                active.resize(keep);
                if (d > radius(0, 0)) continue;
                for (std::size_t s = 0; s < S; ++s) {
                    if (d > radius(s, 0)) break;
                    // Lags with d <= r(i + lag) form a prefix since r decreases.
                    std::size_t lo = 0, hi = window + 1;
                    while (lo < hi) {
                        const std::size_t mid = (lo + hi) / 2;
                        if (d <= radius(s, mid)) lo = mid + 1;
                        else hi = mid;
                    }
                    for (std::size_t lag = 0; lag < lo; ++lag) ++c.marginal[s][lag];
                    ++c.joint[s][0];
                    active.emplace_back(s, t);
                }
            }
        });
        return c;
    });

    // Pooled table and per-member normalized sums.
    const double expectation = targets.expected(n);
    std::vector<double> sums;
    std::vector<std::vector<double>> joint(S, std::vector<double>(window + 1, 0.0));
    std::vector<std::vector<double>> marginal(S, std::vector<double>(window + 1, 0.0));
    double total_length = 0.0;
    std::size_t truncated = 0;
    for (const auto& c : members) {
        if (c.truncated) ++truncated;
        if (c.length == 0) continue;
        const double L = static_cast<double>(c.length);
        total_length += L;
        double sum = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            const double pi = static_cast<double>(c.marginal[s][0]) / L;
            for (std::size_t lag = 0; lag <= window; ++lag) {
                joint[s][lag] += static_cast<double>(c.joint[s][lag]);
                marginal[s][lag] += static_cast<double>(c.marginal[s][lag]);
                if (lag == 0) continue;
                const double pj = static_cast<double>(c.marginal[s][lag]) / L;
                sum += weight[s] * (static_cast<double>(c.joint[s][lag]) / L - pi * pj);
            }
        }
        sums.push_back(sum / expectation);
    }
    if (truncated > 0) report.warnings.push_back(std::to_string(truncated) + " member orbits truncated");
    if (sums.size() < 2) throw EstimationError("sp_diagnostic: fewer than two usable member orbits");
    report.normalized_sum = stats::mean(sums);
    report.sigma = stats::stddev(sums) / std::sqrt(static_cast<double>(sums.size()));

    for (std::size_t s = 0; s < S; ++s) {
        const double pi = marginal[s][0] / total_length;
        for (std::size_t lag = 0; lag <= window; ++lag) {
            SpRow row;
            row.i = idx[s];
            row.lag = lag;
            row.joint = joint[s][lag] / total_length;
            row.mass_i = pi;
            row.mass_j = marginal[s][lag] / total_length;
            row.covariance = row.joint - row.mass_i * row.mass_j;
            report.rows.push_back(row);
        }
    }
    return report;
}

std::vector<ShortReturnRow> short_return_profile(MapKind kind, const ModelParams& params, double center,
                                                 const std::vector<double>& radii, std::size_t orbit_length,
                                                 std::uint64_t seed, std::size_t j_cap)
{
    if (kind == MapKind::baker) throw DomainError("short_return_profile: needs a 1D map (lorenz or doubling)");
    if (radii.empty()) throw DomainError("short_return_profile: empty radius grid");
    for (double r : radii) {
        if (!(r > 0.0 && r < 0.5)) throw DomainError("short_return_profile: radii must lie in (0, 1/2)");
    }

    std::vector<ShortReturnRow> rows(radii.size());
    std::size_t window = 0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        rows[k].r = radii[k];
        rows[k].j_max = std::min(j_cap, static_cast<std::size_t>(std::ceil(std::pow(std::abs(std::log(radii[k])), 5))));
        rows[k].j_max = std::max<std::size_t>(rows[k].j_max, 1);
        window = std::max(window, rows[k].j_max);
    }
    std::vector<std::vector<std::uint64_t>> returns(radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k) returns[k].assign(rows[k].j_max + 1, 0);
    std::vector<std::vector<std::uint64_t>> recent(radii.size());

    Stepper stepper = random_stepper(kind, params, RandomStream(seed, StreamPurpose::start, 0), 1000);
    std::visit(
        [&](auto& s) {
            for (std::uint64_t t = 0; t < orbit_length; ++t) {
                if (t > 0 && !s.step()) break;
                const double d = std::abs(s.point().x - center);
                for (std::size_t k = 0; k < radii.size(); ++k) {
                    if (d > radii[k]) continue;
                    auto& seen = recent[k];
                    std::size_t keep = 0;
                    for (auto t0 : seen) {
                        const auto j = t - t0;
                        if (j > rows[k].j_max) continue;
                        ++returns[k][j];
                        seen[keep++] = t0;
                    }
                    seen.resize(keep);
                    seen.push_back(t);
                    ++rows[k].visits;
                }
            }
        },
        stepper);

    for (std::size_t k = 0; k < radii.size(); ++k) {
        auto& row = rows[k];
        if (row.visits < kMinBallSamples) {
            throw ResolutionError("short_return_profile: fewer than 50 visits to the ball of radius " +
                                  std::to_string(row.r));
        }
        row.ratio.assign(row.j_max + 1, 0.0);
        row.ratio[0] = 1.0;
        for (std::size_t j = 1; j <= row.j_max; ++j) {
            row.ratio[j] = static_cast<double>(returns[k][j]) / static_cast<double>(row.visits);
            if (row.ratio[j] > row.sup) {
                row.sup = row.ratio[j];
                row.argsup = j;
            }
        }
    }
    return rows;
}

} // namespace lorenzlab
