// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/ulam.hpp"

#include "lorenzlab/errors.hpp"
#include "lorenzlab/orbit.hpp"
#include "lorenzlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lorenzlab {

namespace {

/// Increasing branch of a piecewise monotone map on [lo, hi].
struct Branch {
    double lo;
    double hi;
    std::function<double(double)> forward;
    std::function<double(double)> inverse;
};

std::vector<Branch> branches(MapKind kind, const ModelParams& p)
{
    if (kind == MapKind::doubling) {
        return {
            {-0.5, -0.25, [](double x) { return 2.0 * x + 1.0; }, [](double y) { return (y - 1.0) / 2.0; }},
            {-0.25, 0.25, [](double x) { return 2.0 * x; }, [](double y) { return y / 2.0; }},
            {0.25, 0.5, [](double x) { return 2.0 * x - 1.0; }, [](double y) { return (y + 1.0) / 2.0; }},
        };
    }
    if (kind != MapKind::lorenz) throw ValidationError("Ulam operator: 1D maps only (lorenz or doubling)");
    p.validate();
    const double a = p.alpha(), th = p.theta, b0 = p.b0, b1 = p.b1;
    return {
        {-0.5, 0.0, [=](double x) { return -th * std::pow(-x, a) + b1; },
         [=](double y) { return -std::pow(std::max(0.0, (b1 - y) / th), 1.0 / a); }},
        {0.0, 0.5, [=](double x) { return th * std::pow(x, a) + b0; },
         [=](double y) { return std::pow(std::max(0.0, (y - b0) / th), 1.0 / a); }},
    };
}

void check_bins(std::size_t bins)
{
    if (bins < 64 || bins > 8192 || (bins & (bins - 1)) != 0) {
        throw DomainError("bins must be a power of two in [64, 8192]");
    }
}

} // namespace

UlamOperator::UlamOperator(MapKind kind, const ModelParams& params, std::size_t bins)
{
    if (bins < 4 || (bins & (bins - 1)) != 0) throw DomainError("UlamOperator: bins must be a power of two >= 4");
    const auto br = branches(kind, params);
    const double w = 1.0 / static_cast<double>(bins);
    auto edge = [&](std::size_t j) { return static_cast<double>(j) * w - 0.5; };
    auto cell = [&](double y) {
        const double f = std::floor((y + 0.5) * static_cast<double>(bins));
        return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(bins - 1)));
    };

    rows_.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        const double a = edge(i), b = edge(i + 1);
        const double mid = 0.5 * (a + b);
        const auto it = std::find_if(br.begin(), br.end(), [&](const Branch& x) { return mid >= x.lo && mid < x.hi; });
        const double y0 = it->forward(a), y1 = it->forward(b);
        const double x0 = it->inverse(y0);
        double total = 0.0;
        auto& row = rows_[i];
        for (std::size_t j = cell(y0); j <= cell(y1); ++j) {
            const double ylo = std::max(y0, edge(j));
            const double yhi = std::min(y1, edge(j + 1));
            if (!(yhi > ylo)) continue;
            const double xlo = ylo == y0 ? x0 : it->inverse(ylo);
            const double xhi = yhi == y1 ? b : it->inverse(yhi);
            const double frac = std::clamp((xhi - xlo) / (b - a), 0.0, 1.0);
            if (frac > 0.0) {
                row.push_back({static_cast<std::uint32_t>(j), frac});
                total += frac;
            }
        }
        for (auto& e : row) e.value /= total;
    }
}

std::vector<double> UlamOperator::push_forward(const std::vector<double>& weights) const
{
    std::vector<double> out(weights.size(), 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (const auto& e : rows_[i]) out[e.column] += weights[i] * e.value;
    }
    return out;
}

double UlamOperator::residual(const std::vector<double>& weights) const
{
    const auto next = push_forward(weights);
    double r = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) r += std::abs(next[i] - weights[i]);
    return r;
}

UlamDensity orbit_histogram(MapKind kind, const ModelParams& params, std::size_t bins, std::size_t n,
                            std::uint64_t seed, std::size_t burn_in)
{
    if (kind == MapKind::baker) kind = MapKind::doubling;
    UlamDensity d;
    d.bins = bins;
    d.method = UlamDensity::Method::orbit_histogram;
    d.weights.assign(bins, 0.0);
    std::vector<std::uint64_t> counts(bins, 0);
    auto stepper = random_stepper(kind, params, RandomStream(seed, StreamPurpose::measure, 0), burn_in);
    const double scale = static_cast<double>(bins);
    std::size_t produced = 0;
    visit_stepper(stepper, [&](auto& s) {
        produced = for_each_point(s, n, [&](std::size_t, SectionPoint p) {
                       const double f = std::floor((p.x + 0.5) * scale);
                       ++counts[static_cast<std::size_t>(std::clamp(f, 0.0, scale - 1.0))];
                   }).points;
    });
    if (produced < n) d.warnings.push_back("orbit truncated on the singular line after " + std::to_string(produced) + " points");
    for (std::size_t i = 0; i < bins; ++i) d.weights[i] = static_cast<double>(counts[i]) / static_cast<double>(produced);
    d.residual = UlamOperator(kind, params, bins).residual(d.weights);
    return d;
}

UlamDensity ulam_acim(MapKind kind, const ModelParams& params, std::size_t bins, std::size_t n,
                      const UlamOptions& options)
{
    check_bins(bins);
    if (kind == MapKind::baker) kind = MapKind::doubling;
    const UlamOperator op(kind, params, bins);
    UlamDensity d;
    d.bins = bins;
    d.weights.assign(bins, 1.0 / static_cast<double>(bins));
    d.residual = op.residual(d.weights);
    while (d.residual > options.tolerance && d.iterations < options.max_iterations) {
        auto next = op.push_forward(d.weights);
        double sum = 0.0;
        for (double v : next) sum += v;
        for (double& v : next) v /= sum;
        d.weights = std::move(next);
        ++d.iterations;
        d.residual = op.residual(d.weights);
    }
    if (d.residual <= options.tolerance) return d;

    auto fallback = orbit_histogram(kind, params, bins, n, options.seed, options.burn_in);
    fallback.iterations = d.iterations;
    fallback.warnings.insert(fallback.warnings.begin(), "power iteration did not reach L1 residual " +
                                                            std::to_string(options.tolerance) + "; used orbit histogram");
    return fallback;
}

double discrete_lipschitz(const UlamDensity& d)
{
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < d.bins; ++i) m = std::max(m, std::abs(d.density(i + 1) - d.density(i)));
    return m * static_cast<double>(d.bins);
}

double total_variation(const UlamDensity& d)
{
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < d.bins; ++i) tv += std::abs(d.density(i + 1) - d.density(i));
    return tv;
}

double l1_distance(const UlamDensity& a, const UlamDensity& b)
{
    const UlamDensity& coarse = a.bins <= b.bins ? a : b;
    const UlamDensity& fine = a.bins <= b.bins ? b : a;
    if (fine.bins % coarse.bins != 0) throw DomainError("l1_distance: bin counts must nest");
    const std::size_t ratio = fine.bins / coarse.bins;
    double dist = 0.0;
    for (std::size_t i = 0; i < coarse.bins; ++i) {
        double w = 0.0;
        for (std::size_t k = 0; k < ratio; ++k) w += fine.weights[i * ratio + k];
        dist += std::abs(w - coarse.weights[i]);
    }
    return dist;
}

} // namespace lorenzlab
