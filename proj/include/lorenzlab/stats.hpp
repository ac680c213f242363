// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lorenzlab::stats {

double mean(std::span<const double> xs);

/// Unbiased sample variance; 0 for fewer than two values.
double variance(std::span<const double> xs);

double stddev(std::span<const double> xs);

/// One-sample Kolmogorov-Smirnov distance sup |F_n - F|.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic p-value of a KS distance d at effective sample size n.
double ks_pvalue(double d, double n);

inline double gumbel_cdf(double z);
inline double exponential_cdf(double t);

struct GumbelFit {
    double location = 0.0;
    double scale = 1.0;
    int iterations = 0;
};

/// Maximum-likelihood Gumbel fit (Newton iteration on the scale equation).
/// Throws EstimationError on a degenerate sample.
GumbelFit gumbel_mle(std::span<const double> sample);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope*x. Needs two distinct x.
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

struct ChiSquared {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Pearson chi-squared of a count histogram against Poisson(mean). Cells
/// with expected count below 5 are pooled into the tails.
ChiSquared poisson_chi2(std::span<const std::uint64_t> counts, double poisson_mean);

/// Variance-to-mean ratio.
double dispersion_index(std::span<const double> counts);

inline double gumbel_cdf(double z) { return std::exp(-std::exp(-z)); }
inline double exponential_cdf(double t) { return t <= 0.0 ? 0.0 : -std::expm1(-t); }

} // namespace lorenzlab::stats
