// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/evt.hpp"

#include "lorenzlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lorenzlab {

const LevelEntry& LevelSchedule::at(double v, std::size_t n) const
{
    for (const auto& e : entries) {
        if (e.v == v && e.n == n) return e;
    }
    throw DomainError("LevelSchedule: no level for the requested (v, n)");
}

LevelSchedule levels(const EmpiricalMeasure& m, const Observable& obs, const std::vector<double>& v_grid,
                     const std::vector<std::size_t>& n_grid, double dimension, double epsilon)
{
    if (v_grid.empty() || n_grid.empty()) throw DomainError("levels: empty v or n grid");
    if (!(dimension > epsilon && epsilon > 0.0)) throw DomainError("levels: need dimension > epsilon > 0");

    const double total = static_cast<double>(m.size());
    auto samples_for = [&](double v, std::size_t n) {
        return static_cast<std::size_t>(std::ceil(std::exp(-v) / static_cast<double>(n) * total));
    };
    std::size_t k_max = 0;
    for (std::size_t n : n_grid) {
        if (n == 0) throw DomainError("levels: n must be positive");
        for (double v : v_grid) {
            const std::size_t k = samples_for(v, n);
            if (k < kMinBallSamples) {
                std::ostringstream msg;
                msg << "levels: e^-v/n = " << std::exp(-v) / static_cast<double>(n) << " (v = " << v << ", n = " << n
                    << ") rests on " << k << " samples, below the floor of 50";
                throw ResolutionError(msg.str());
            }
            if (k >= m.size()) throw DomainError("levels: e^-v/n must be below 1");
            k_max = std::max(k_max, k);
        }
    }
    const auto profile = m.nearest(obs.center, obs.metric, k_max);
    const auto d = profile.distances();

    LevelSchedule out;
    out.observable = obs;
    out.dimension = dimension;
    out.epsilon = epsilon;
    for (std::size_t n : n_grid) {
        for (double v : v_grid) {
            LevelEntry e;
            e.v = v;
            e.n = n;
            const std::size_t k = samples_for(v, n);
            e.radius = d[k - 1];
            e.u = -std::log(e.radius);
            const auto inside = static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), e.radius) - d.begin());
            e.mass = static_cast<double>(inside) / total;
            e.achieved = static_cast<double>(n) * e.mass;
            const double num = v + std::log(static_cast<double>(n));
            e.bracket_lo = num / (dimension + epsilon);
            e.bracket_hi = num / (dimension - epsilon);
            e.in_bracket = e.u >= e.bracket_lo && e.u <= e.bracket_hi;
            out.entries.push_back(e);
        }
    }
    return out;
}

ScalingFit fit_scaling(const EmpiricalMeasure& m, const Observable& obs, double mass_hi, double mass_lo)
{
    if (!(mass_lo > 0.0 && mass_lo < mass_hi && mass_hi < 1.0)) throw DomainError("fit_scaling: need 0 < mass_lo < mass_hi < 1");
    const double total = static_cast<double>(m.size());
    const auto k_hi = static_cast<std::size_t>(std::ceil(mass_hi * total));
    const auto k_lo = std::max(kMinBallSamples, static_cast<std::size_t>(std::ceil(mass_lo * total)));
    if (k_hi <= k_lo) throw ResolutionError("fit_scaling: mass_hi rests on too few samples");
    const auto profile = m.nearest(obs.center, obs.metric, k_hi);
    const auto d = profile.distances();
    const double r_hi = d[k_hi - 1];
    const double r_min = std::min(d[k_lo - 1], r_hi / 128.0);
    ScalingFit fit;
    fit.estimate = local_dimension(profile, r_hi, r_min);
    fit.dimension = fit.estimate.dimension;
    fit.log_c = fit.estimate.log_c;
    return fit;
}

void check_non_periodic(MapKind kind, const ModelParams& params, const Observable& obs, double r, std::size_t horizon)
{
    Stepper s = make_stepper(kind, params, obs.center);
    std::visit(
        [&](auto& st) {
            for (std::size_t j = 1; j <= horizon; ++j) {
                if (!st.step()) return;
                const double d = obs.distance(st.point());
                if (d <= r) {
                    std::ostringstream msg;
                    msg << "center returns within " << d << " <= " << r << " of itself after " << j << " steps";
                    throw PeriodicCenterError(msg.str());
                }
            }
        },
        s);
}

SectionPoint find_periodic_point(const ModelParams& params, int period, double x_guess)
{
    if (period < 1) throw DomainError("find_periodic_point: period must be positive");
    params.validate();
    const detail::LorenzKernel k(params);
    const double a = params.alpha();
    double x = x_guess;
    for (int it = 0; it < 100; ++it) {
        double y = x;
        double deriv = 1.0;
        for (int j = 0; j < period; ++j) {
            if (y == 0.0) throw EstimationError("find_periodic_point: orbit hit the singular line");
            deriv *= params.theta * a * std::pow(std::abs(y), a - 1.0);
            y = k.T(y);
        }
        const double step = (y - x) / (deriv - 1.0);
        x -= step;
        if (!(std::abs(x) < 0.5)) throw EstimationError("find_periodic_point: Newton left the interval");
        if (std::abs(step) < 1e-16) break;
    }
    // Fiber maps y -> k|x|^beta y +- c compose to y -> A y + B.
    double A = 1.0, B = 0.0, xi = x;
    for (int j = 0; j < period; ++j) {
        const double slope = params.g_kappa * std::pow(std::abs(xi), params.beta());
        const double offset = xi > 0.0 ? params.g_c : -params.g_c;
        A = slope * A;
        B = slope * B + offset;
        xi = k.T(xi);
    }
    const SectionPoint p{x, B / (1.0 - A)};
    SectionPoint q = p;
    for (int j = 0; j < period; ++j) q = k.F(q);
    if (std::hypot(q.x - p.x, q.y - p.y) > 1e-9) throw EstimationError("find_periodic_point: no convergence");
    return p;
}

SectionPoint generic_center(const EmpiricalMeasure& m, const ModelParams& params, std::uint64_t seed, double r_check,
                            Shape metric)
{
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        RandomStream rng(seed, StreamPurpose::center, attempt);
        const SectionPoint c = m.sample(static_cast<std::size_t>(rng.below(m.size())));
        try {
            check_non_periodic(m.meta().system, params, Observable{c, metric}, r_check);
            return c;
        }
        catch (const PeriodicCenterError&) {
        }
    }
    throw EstimationError("generic_center: no non-periodic center in 100 draws");
}

std::vector<double> BlockMaxima::maxima() const
{
    std::vector<double> out;
    for (const auto& t : trials) {
        if (!t.truncated) out.push_back(Observable::value_at_distance(t.min_distance));
    }
    return out;
}

BlockMaxima block_maxima_cdf(const OrbitSource& source, const Observable& obs, const std::vector<Level>& levels,
                             const MaximaOptions& options)
{
    if (levels.empty()) throw DomainError("block_maxima_cdf: no levels");
    if (options.n == 0 || options.trials == 0) throw DomainError("block_maxima_cdf: n and trials must be positive");
    for (const auto& l : levels) {
        if (l.n != options.n) throw DomainError("block_maxima_cdf: every level must be calibrated for n");
    }
    const std::size_t n = options.n;
    const std::size_t L = levels.size();
    double r_max = 0.0;
    for (const auto& l : levels) r_max = std::max(r_max, l.radius);

    auto scan = [&](auto& s, MaximaTrial& trial, bool first_block) {
        trial.min_distance = std::numeric_limits<double>::infinity();
        trial.entry.assign(L, n);
        for (std::size_t j = 0; j < n; ++j) {
            if ((j > 0 || !first_block) && !s.step()) {
                trial.truncated = true;
                return false;
            }
            const double d = obs.distance(s.point());
            trial.min_distance = std::min(trial.min_distance, d);
            if (d < r_max) {
                for (std::size_t l = 0; l < L; ++l) {
                    if (d < levels[l].radius && trial.entry[l] == n) trial.entry[l] = j;
                }
            }
        }
        return true;
    };

    BlockMaxima out;
    out.n = n;
    if (options.mode == MaximaMode::independent_starts) {
        out.trials = map_members<MaximaTrial>(options.exec, options.trials, [&](std::size_t t) {
            MaximaTrial trial;
            source.with_stepper(RandomStream(options.seed, StreamPurpose::trial, t),
                                [&](auto& s) { scan(s, trial, true); });
            return trial;
        });
    }
    else {
        out.trials.resize(options.trials);
        source.with_stepper(RandomStream(options.seed, StreamPurpose::trial, 0), [&](auto& s) {
            for (std::size_t t = 0; t < options.trials; ++t) {
                if (!scan(s, out.trials[t], t == 0)) {
                    for (std::size_t u = t + 1; u < options.trials; ++u) out.trials[u].truncated = true;
                    return;
                }
            }
        });
    }

    for (const auto& t : out.trials) out.excluded += t.truncated ? 1 : 0;
    const double used = static_cast<double>(out.trials.size() - out.excluded);
    if (used == 0.0) throw EstimationError("block_maxima_cdf: every trial was truncated");
    for (std::size_t l = 0; l < L; ++l) {
        BlockMaximaRow row;
        row.v = levels[l].v;
        row.u = levels[l].u;
        row.limit = std::exp(-std::exp(-row.v));
        row.sigma = std::sqrt(row.limit * (1.0 - row.limit) / used);
        double below = 0.0;
        for (const auto& t : out.trials) {
            if (t.truncated) continue;
            const bool no_exceedance = t.min_distance >= levels[l].radius;
            if (no_exceedance) below += 1.0;
            if (no_exceedance != (t.entry[l] == n)) row.hitting_identity = false;
        }
        row.p_hat = below / used;
        out.rows.push_back(row);
    }
    return out;
}

GumbelKs gumbel_ks(const std::vector<double>& maxima, double a, double b)
{
    if (maxima.size() < 1000) throw DomainError("gumbel_ks: need at least 1e3 maxima");
    if (!(a > 0.0)) throw DomainError("gumbel_ks: scale a must be positive");
    std::vector<double> z(maxima.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = a * (maxima[i] - b);
    GumbelKs out;
    out.size = z.size();
    out.mle = stats::gumbel_mle(z);
    out.ks = stats::ks_distance(z, stats::gumbel_cdf);
    out.p_value = stats::ks_pvalue(out.ks, static_cast<double>(out.size));
    return out;
}

std::uint64_t ExceedanceRecord::exceedances(std::size_t level) const
{
    std::uint64_t total = 0;
    for (const auto& m : times) total += m[level].size();
    return total;
}

ExceedanceRecord record_exceedances(const OrbitSource& source, const Observable& obs, const std::vector<Level>& levels,
                                    std::size_t member_length, std::size_t members, std::uint64_t seed, Exec exec)
{
    if (levels.empty() || members == 0 || member_length == 0) {
        throw DomainError("record_exceedances: need levels, members and a positive length");
    }
    ExceedanceRecord rec;
    rec.observable = obs;
    rec.levels = levels;
    double r_max = 0.0;
    for (const auto& l : levels) r_max = std::max(r_max, l.radius);

    struct Member {
        std::uint64_t length = 0;
        bool truncated = false;
        std::vector<std::vector<std::uint64_t>> times;
    };
    auto runs = map_members<Member>(exec, members, [&](std::size_t m) {
        Member out;
        out.times.resize(levels.size());
        source.with_stepper(RandomStream(seed, StreamPurpose::member, m), [&](auto& s) {
            for (std::uint64_t t = 0; t < member_length; ++t) {
                if (t > 0 && !s.step()) {
                    out.truncated = true;
                    return;
                }
                ++out.length;
                const double d = obs.distance(s.point());
                if (d >= r_max) continue;
                for (std::size_t l = 0; l < levels.size(); ++l) {
                    if (d < levels[l].radius) out.times[l].push_back(t);
                }
            }
        });
        return out;
    });
    for (auto& r : runs) {
        rec.lengths.push_back(r.length);
        rec.times.push_back(std::move(r.times));
        rec.truncated += r.truncated ? 1 : 0;
    }
    return rec;
}

const DPrimeRow& DPrimeTable::at(std::size_t n, std::size_t k) const
{
    for (const auto& r : rows) {
        if (r.n == n && r.k == k) return r;
    }
    throw DomainError("DPrimeTable: no row for the requested (n, k)");
}

DPrimeTable d_prime_stat(const ExceedanceRecord& record, const std::vector<std::size_t>& k_grid)
{
    if (k_grid.empty()) throw DomainError("d_prime_stat: empty k grid");
    for (auto k : k_grid) {
        if (k == 0) throw DomainError("d_prime_stat: k must be positive");
    }
    const std::size_t k_min = *std::min_element(k_grid.begin(), k_grid.end());
    DPrimeTable table;
    for (std::size_t l = 0; l < record.levels.size(); ++l) {
        const auto& level = record.levels[l];
        const double n = static_cast<double>(level.n);
        if (record.exceedances(l) < 100) {
            table.warnings.push_back("level n = " + std::to_string(level.n) +
                                     " has fewer than 100 exceedances; widen the level");
        }
        const std::size_t max_lag = level.n / k_min;
        std::vector<std::vector<double>> per_member(k_grid.size());
        std::vector<std::uint64_t> pairs(k_grid.size(), 0);
        double total_length = 0.0;
        for (std::size_t m = 0; m < record.members(); ++m) {
            const auto& e = record.times[m][l];
            std::vector<std::uint64_t> by_lag(max_lag + 1, 0);
            for (std::size_t a = 0; a < e.size(); ++a) {
                for (std::size_t b = a + 1; b < e.size() && e[b] - e[a] <= max_lag; ++b) ++by_lag[e[b] - e[a]];
            }
            // Cumulative pair counts up to each lag.
            for (std::size_t j = 1; j <= max_lag; ++j) by_lag[j] += by_lag[j - 1];
            const double L = static_cast<double>(record.lengths[m]);
            total_length += L;
            for (std::size_t q = 0; q < k_grid.size(); ++q) {
                const std::uint64_t c = by_lag[level.n / k_grid[q]];
                pairs[q] += c;
                per_member[q].push_back(n * static_cast<double>(c) / L);
            }
        }
        for (std::size_t q = 0; q < k_grid.size(); ++q) {
            DPrimeRow row;
            row.n = level.n;
            row.k = k_grid[q];
            row.pairs = pairs[q];
            row.value = n * static_cast<double>(pairs[q]) / total_length;
            row.sigma = per_member[q].size() > 1
                            ? stats::stddev(per_member[q]) / std::sqrt(static_cast<double>(per_member[q].size()))
                            : 0.0;
            const double freq = static_cast<double>(record.exceedances(l)) / total_length;
            row.independent = n * static_cast<double>(level.n / k_grid[q]) * freq * freq;
            table.rows.push_back(row);
        }
    }
    return table;
}

std::size_t proof_gap(std::size_t n) { return static_cast<std::size_t>(std::llround(std::pow(std::log(static_cast<double>(n)), 5))); }

D3Table d3_stat(const ExceedanceRecord& record, std::size_t level, const std::vector<std::size_t>& t_grid, std::size_t l)
{
    if (level >= record.levels.size()) throw DomainError("d3_stat: level index out of range");
    const std::size_t n = record.levels[level].n;
    if (l > n) throw DomainError("d3_stat: need l <= n");
    D3Table table;
    table.n = n;
    table.l = l;
    if (record.exceedances(level) < 100) table.warnings.push_back("fewer than 100 exceedances; widen the level");
    const std::size_t t_n = proof_gap(n);

    for (std::size_t t : t_grid) {
        if (2 * t > n) {
            table.warnings.push_back("t = " + std::to_string(t) + " exceeds n/2");
        }
        std::uint64_t joint_count = 0, visit_count = 0, free_count = 0;
        double joint_den = 0.0, free_den = 0.0;
        std::vector<double> diffs;
        for (std::size_t m = 0; m < record.members(); ++m) {
            const auto& e = record.times[m][level];
            const std::uint64_t L = record.lengths[m];
            if (L < t + l + 1) continue;
            const std::uint64_t last_start = L - t - l; // inclusive
            std::uint64_t jc = 0, vc = 0;
            for (auto s : e) {
                if (s > last_start) break;
                ++vc;
                const auto it = std::lower_bound(e.begin(), e.end(), s + t);
                if (it == e.end() || *it >= s + t + l) ++jc;
            }
            // Starts s in [0, L - l] whose window [s, s + l) has no exceedance.
            std::uint64_t fc = 0;
            std::int64_t prev = -1;
            auto add_gap = [&](std::int64_t next) {
                const std::int64_t c = next - static_cast<std::int64_t>(l) - prev;
                if (c > 0) fc += static_cast<std::uint64_t>(c);
            };
            for (auto s : e) {
                add_gap(static_cast<std::int64_t>(s));
                prev = static_cast<std::int64_t>(s);
            }
            add_gap(static_cast<std::int64_t>(L));
            const double jd = static_cast<double>(last_start + 1);
            const double fd = static_cast<double>(L - l + 1);
            joint_count += jc;
            visit_count += vc;
            free_count += fc;
            joint_den += jd;
            free_den += fd;
            diffs.push_back(static_cast<double>(jc) / jd - static_cast<double>(vc) / jd * (static_cast<double>(fc) / fd));
        }
        if (joint_den == 0.0) throw EstimationError("d3_stat: orbits shorter than t + l");
        D3Row row;
        row.t = t;
        row.segments = visit_count;
        row.joint = static_cast<double>(joint_count) / joint_den;
        const double p_free = static_cast<double>(free_count) / free_den;
        row.product = static_cast<double>(visit_count) / joint_den * p_free;
        row.gamma = std::abs(row.joint - row.product);
        row.sigma = diffs.size() > 1 ? stats::stddev(diffs) / std::sqrt(static_cast<double>(diffs.size())) : 0.0;
        row.proof_choice = t == t_n;
        table.rows.push_back(row);
    }
    return table;
}

double ReppWindow::length() const
{
    double total = 0.0;
    for (const auto& [a, b] : intervals) total += b - a;
    return total;
}

double ReppWindow::end() const
{
    double e = 0.0;
    for (const auto& iv : intervals) e = std::max(e, iv.second);
    return e;
}

namespace {

void check_windows(const std::vector<ReppWindow>& windows)
{
    if (windows.empty()) throw DomainError("repp: no windows");
    for (const auto& w : windows) {
        if (w.intervals.empty()) throw DomainError("repp: empty window");
        auto iv = w.intervals;
        std::sort(iv.begin(), iv.end());
        for (std::size_t i = 0; i < iv.size(); ++i) {
            if (!(iv[i].first >= 0.0 && iv[i].second > iv[i].first)) throw DomainError("repp: bad interval");
            if (i > 0 && iv[i].first < iv[i - 1].second) throw DomainError("repp: intervals overlap");
        }
    }
}

void summarize(ReppCounts& out)
{
    const auto& c0 = out.counts[0];
    std::vector<double> c(c0.begin(), c0.end());
    out.mean = stats::mean(c);
    out.dispersion = stats::dispersion_index(c);
    out.chi2 = stats::poisson_chi2(c0, out.windows[0].length());
    if (!out.gaps.empty()) out.gap_ks = stats::ks_distance(out.gaps, stats::exponential_cdf);
}

} // namespace

ReppCounts repp(const ExceedanceRecord& record, std::size_t level, const std::vector<ReppWindow>& windows,
                std::size_t max_trials)
{
    check_windows(windows);
    if (level >= record.levels.size()) throw DomainError("repp: level index out of range");
    const double mass = record.levels[level].mass;
    ReppCounts out;
    out.windows = windows;
    out.a_n = 1.0 / mass;
    double horizon = 0.0;
    for (const auto& w : windows) horizon = std::max(horizon, w.end());
    const auto block = static_cast<std::uint64_t>(std::ceil(horizon * out.a_n));
    auto offset = [&](double s) { return static_cast<std::uint64_t>(std::ceil(s * out.a_n)); };
    if (record.exceedances(level) < 100) out.warnings.push_back("fewer than 100 exceedances; widen the level");

    out.counts.assign(windows.size(), {});
    for (std::size_t m = 0; m < record.members(); ++m) {
        const auto& e = record.times[m][level];
        const std::uint64_t trials = record.lengths[m] / block;
        for (std::uint64_t t = 0; t < trials; ++t) {
            if (max_trials != 0 && out.trials == max_trials) break;
            const std::uint64_t o = t * block;
            for (std::size_t w = 0; w < windows.size(); ++w) {
                std::uint64_t count = 0;
                for (const auto& [a, b] : windows[w].intervals) {
                    const auto lo = std::lower_bound(e.begin(), e.end(), o + offset(a));
                    const auto hi = std::lower_bound(e.begin(), e.end(), o + offset(b));
                    count += static_cast<std::uint64_t>(hi - lo);
                }
                out.counts[w].push_back(count);
            }
            ++out.trials;
        }
        for (std::size_t i = 1; i < e.size(); ++i) out.gaps.push_back(static_cast<double>(e[i] - e[i - 1]) * mass);
    }
    if (out.trials == 0) throw EstimationError("repp: orbits shorter than one trial block");
    summarize(out);
    return out;
}

ReppCounts synthetic_poisson_repp(const std::vector<ReppWindow>& windows, std::size_t trials, std::uint64_t seed)
{
    check_windows(windows);
    if (trials == 0) throw DomainError("synthetic_poisson_repp: trials must be positive");
    ReppCounts out;
    out.windows = windows;
    out.a_n = 1.0;
    out.trials = trials;
    double horizon = 0.0;
    for (const auto& w : windows) horizon = std::max(horizon, w.end());
    out.counts.assign(windows.size(), std::vector<std::uint64_t>(trials, 0));
    for (std::size_t t = 0; t < trials; ++t) {
        RandomStream rng(seed, StreamPurpose::synthetic, t);
        double time = 0.0;
        for (;;) {
            const double gap = -std::log(rng.uniform_pos());
            out.gaps.push_back(gap);
            time += gap;
            if (time >= horizon) break;
            for (std::size_t w = 0; w < windows.size(); ++w) {
                for (const auto& [a, b] : windows[w].intervals) {
                    if (time >= a && time < b) ++out.counts[w][t];
                }
            }
        }
    }
    summarize(out);
    return out;
}

} // namespace lorenzlab
