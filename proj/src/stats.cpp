// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/stats.hpp"

#include "lorenzlab/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lorenzlab::stats {

double mean(std::span<const double> xs)
{
    if (xs.empty()) return 0.0;
    // Kahan-compensated so long tables reduce identically to the summary.
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs)
{
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(xs.size() - 1);
}

double stddev(std::span<const double> xs) { return std::sqrt(variance(xs)); }

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf)
{
    if (sample.empty()) throw EstimationError("ks_distance: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) throw EstimationError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_pvalue(double d, double n)
{
    const double sn = std::sqrt(n);
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

GumbelFit gumbel_mle(std::span<const double> sample)
{
    if (sample.size() < 2) throw EstimationError("gumbel_mle: need at least two values");
    const double m = mean(sample);
    const double sd = stddev(sample);
    if (!(sd > 0.0)) throw EstimationError("gumbel_mle: degenerate sample (zero variance)");

    // Scale equation: beta = mean - sum x e^{-x/beta} / sum e^{-x/beta}.
    // Shift by the minimum for stable exponentials.
    const double shift = *std::min_element(sample.begin(), sample.end());
    double beta = sd * std::sqrt(6.0) / M_PI;
    GumbelFit fit;
    for (int it = 1; it <= 200; ++it) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (double x : sample) {
            const double z = x - shift;
            const double w = std::exp(-z / beta);
            s0 += w;
            s1 += z * w;
            s2 += z * z * w;
        }
        const double g = beta - (m - shift) + s1 / s0;
        // d/dbeta of s1/s0 = (s2/s0 - (s1/s0)^2) / beta^2
        const double dg = 1.0 + (s2 / s0 - (s1 / s0) * (s1 / s0)) / (beta * beta);
        double next = beta - g / dg;
        if (!(next > 0.0)) next = beta / 2.0;
        fit.iterations = it;
        const bool done = std::abs(next - beta) < 1e-12 * beta;
        beta = next;
        if (done) break;
    }
    double s0 = 0.0;
    for (double x : sample) s0 += std::exp(-(x - shift) / beta);
    fit.scale = beta;
    fit.location = shift - beta * std::log(s0 / static_cast<double>(sample.size()));
    return fit;
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size() || xs.size() < 2) throw EstimationError("linear_fit: need >= 2 paired points");
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw EstimationError("linear_fit: x values are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    fit.points = xs.size();
    return fit;
}

ChiSquared poisson_chi2(std::span<const std::uint64_t> counts, double poisson_mean)
{
    if (counts.empty()) throw EstimationError("poisson_chi2: empty sample");
    if (!(poisson_mean > 0.0)) throw EstimationError("poisson_chi2: mean must be positive");
    const std::uint64_t max_count = *std::max_element(counts.begin(), counts.end());
    std::vector<double> observed(max_count + 2, 0.0);
    for (auto c : counts) observed[c] += 1.0;
    const double n = static_cast<double>(counts.size());
    const boost::math::poisson_distribution<double> pois(poisson_mean);

    // Cells: [0..lo], lo+1, ..., [hi..inf) with expected >= 5 each.
    std::vector<double> obs_cells;
    std::vector<double> exp_cells;
    double obs_acc = 0.0;
    double exp_acc = 0.0;
    for (std::uint64_t k = 0; k < observed.size(); ++k) {
        obs_acc += observed[k];
        exp_acc += n * boost::math::pdf(pois, static_cast<double>(k));
        if (exp_acc >= 5.0) {
            obs_cells.push_back(obs_acc);
            exp_cells.push_back(exp_acc);
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    // Upper tail beyond the observed range.
    exp_acc += n * boost::math::cdf(boost::math::complement(pois, static_cast<double>(observed.size() - 1)));
    if (!exp_cells.empty()) {
        obs_cells.back() += obs_acc;
        exp_cells.back() += exp_acc;
    }
    else {
        obs_cells.push_back(obs_acc);
        exp_cells.push_back(exp_acc);
    }

    ChiSquared out;
    for (std::size_t i = 0; i < obs_cells.size(); ++i) {
        const double diff = obs_cells[i] - exp_cells[i];
        out.statistic += diff * diff / exp_cells[i];
    }
    out.dof = static_cast<int>(obs_cells.size()) - 1;
    if (out.dof >= 1) {
        const boost::math::chi_squared_distribution<double> chi(out.dof);
        out.p_value = boost::math::cdf(boost::math::complement(chi, out.statistic));
    }
    return out;
}

double dispersion_index(std::span<const double> counts)
{
    const double m = mean(counts);
    if (!(m > 0.0)) throw EstimationError("dispersion_index: zero mean");
    return variance(counts) / m;
}

} // namespace lorenzlab::stats
