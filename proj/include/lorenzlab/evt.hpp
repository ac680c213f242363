// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/measure.hpp"
#include "lorenzlab/source.hpp"
#include "lorenzlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lorenzlab {

/// phi(x) = -log d(x, x0), clamped at kCap where the distance underflows.
/// Exceedance logic compares distances with radii and never uses phi.
struct Observable {
    static constexpr double kCap = 700.0;

    SectionPoint center{};
    Shape metric = Shape::ball; ///< ball: Euclidean; square: max metric

    double distance(SectionPoint p) const { return shape_distance(p, center, metric); }
    double value(SectionPoint p) const { return value_at_distance(distance(p)); }
    static double value_at_distance(double d) { return d > 0.0 ? std::min(kCap, -std::log(d)) : kCap; }
};

/// A level u with its ball U = {phi > u} = open ball of radius e^-u.
struct Level {
    double v = 0.0;
    std::size_t n = 0;
    double u = 0.0;
    double radius = 0.0;
    double mass = 0.0; ///< measured mass of the closed ball
};

struct LevelEntry : Level {
    double achieved = 0.0; ///< n * mass, targets e^-v
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool in_bracket = false;
};

struct LevelSchedule {
    Observable observable;
    double dimension = 0.0;
    double epsilon = 0.1;
    std::vector<LevelEntry> entries; ///< n-major, v-minor

    const LevelEntry& at(double v, std::size_t n) const;
};

/// u_n(v) = -log invert_mass(e^-v / n) for every (v, n), with the bracket
/// [(v + log n)/(d + eps), (v + log n)/(d - eps)] for the given dimension.
LevelSchedule levels(const EmpiricalMeasure& m, const Observable& obs, const std::vector<double>& v_grid,
                     const std::vector<std::size_t>& n_grid, double dimension, double epsilon = 0.1);

/// Power law mu(B_r) ~ c r^d fitted over dyadic radii between the radii
/// holding mass_hi and mass_lo (at least eight radii).
struct ScalingFit {
    LocalDimensionEstimate estimate;
    double dimension = 0.0;
    double log_c = 0.0;

    /// Gumbel normalization: a = d, b = (log n + log c)/d.
    double a() const { return dimension; }
    double b(double n) const { return (std::log(n) + log_c) / dimension; }
};
ScalingFit fit_scaling(const EmpiricalMeasure& m, const Observable& obs, double mass_hi = 1e-3, double mass_lo = 1e-6);

/// Throws PeriodicCenterError when some F^j(x0), 1 <= j <= horizon, lies
/// within r of x0.
void check_non_periodic(MapKind kind, const ModelParams& params, const Observable& obs, double r,
                        std::size_t horizon = 50);

/// A periodic point of F near x_guess: Newton on T^p(x) = x, then the
/// fiber coordinate from the composed affine fiber maps.
SectionPoint find_periodic_point(const ModelParams& params, int period, double x_guess);

/// Draws a center from the measure and redraws until it passes
/// check_non_periodic at radius r_check.
SectionPoint generic_center(const EmpiricalMeasure& m, const ModelParams& params, std::uint64_t seed, double r_check,
                            Shape metric = Shape::ball);

enum class MaximaMode { independent_starts, blocks };

struct MaximaOptions {
    std::size_t n = 100000;
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
    MaximaMode mode = MaximaMode::independent_starts;
    Exec exec = Exec::parallel;
};

struct MaximaTrial {
    double min_distance = 0.0;          ///< M_n = -log min_distance
    std::vector<std::uint64_t> entry;   ///< per level: first j < n with X_j in U, else n
    bool truncated = false;
};

struct BlockMaximaRow {
    double v = 0.0;
    double u = 0.0;
    double p_hat = 0.0;  ///< fraction of trials with M_n <= u
    double limit = 0.0;  ///< e^{-e^{-v}}
    double sigma = 0.0;  ///< binomial standard error at the limit
    bool hitting_identity = true; ///< {M_n <= u} == {first entry >= n} on every trial
};

struct BlockMaxima {
    std::size_t n = 0;
    std::vector<MaximaTrial> trials;
    std::vector<BlockMaximaRow> rows;
    std::size_t excluded = 0;
    std::vector<double> maxima() const; ///< M_n of every included trial
};

/// P(M_n <= u_n(v)) for each level (all levels must share n), from
/// independent random starts or consecutive blocks of one orbit.
BlockMaxima block_maxima_cdf(const OrbitSource& source, const Observable& obs, const std::vector<Level>& levels,
                             const MaximaOptions& options);

struct GumbelKs {
    double ks = 0.0;
    double p_value = 0.0;
    std::size_t size = 0;
    stats::GumbelFit mle; ///< ML fit of the normalized sample; (0, 1) ideally
};

/// KS distance of a(M - b) to the standard Gumbel law.
GumbelKs gumbel_ks(const std::vector<double>& maxima, double a, double b);

/// Exceedance times of one observable at several levels along long orbits.
struct ExceedanceRecord {
    Observable observable;
    std::vector<Level> levels;
    std::vector<std::uint64_t> lengths;                          ///< per member
    std::vector<std::vector<std::vector<std::uint64_t>>> times;  ///< [member][level], sorted
    std::size_t truncated = 0;

    std::size_t members() const { return lengths.size(); }
    std::uint64_t exceedances(std::size_t level) const;
};

ExceedanceRecord record_exceedances(const OrbitSource& source, const Observable& obs, const std::vector<Level>& levels,
                                    std::size_t member_length, std::size_t members, std::uint64_t seed,
                                    Exec exec = Exec::parallel);

struct DPrimeRow {
    std::size_t n = 0;
    std::size_t k = 0;
    double value = 0.0;       ///< n * sum_{j=1}^{n/k} P(X0 > u, Xj > u)
    double sigma = 0.0;       ///< standard error over members
    double independent = 0.0; ///< n (n/k) p^2 with p the orbit's exceedance frequency
    std::uint64_t pairs = 0;
};

struct DPrimeTable {
    std::vector<DPrimeRow> rows; ///< level-major, k-minor
    std::vector<std::string> warnings;
    const DPrimeRow& at(std::size_t n, std::size_t k) const;
};

/// E(n, k) for every recorded level (its n) and every k.
DPrimeTable d_prime_stat(const ExceedanceRecord& record, const std::vector<std::size_t>& k_grid);

struct D3Row {
    std::size_t t = 0;
    double joint = 0.0;   ///< P(X0 > u, M_{t,l} <= u)
    double product = 0.0; ///< P(X0 > u) P(M_l <= u)
    double gamma = 0.0;   ///< |joint - product|
    double sigma = 0.0;   ///< standard error of joint - product over members
    std::uint64_t segments = 0;
    bool proof_choice = false; ///< t == round((log n)^5)
};

struct D3Table {
    std::size_t n = 0;
    std::size_t l = 0;
    std::vector<D3Row> rows;
    std::vector<std::string> warnings;
};

/// gamma(n, t) = |P(X0 > u, M_{t,l} <= u) - P(X0 > u) P(M_l <= u)| at one
/// recorded level. Segments are the exceedance times of the record.
D3Table d3_stat(const ExceedanceRecord& record, std::size_t level, const std::vector<std::size_t>& t_grid,
                std::size_t l);

/// (log n)^5 rounded to the nearest integer.
std::size_t proof_gap(std::size_t n);

/// Finite union of half-open intervals [a, b) of rescaled time.
struct ReppWindow {
    std::vector<std::pair<double, double>> intervals;
    double length() const;
    double end() const;
};

struct ReppCounts {
    double a_n = 0.0;
    std::size_t trials = 0;
    std::vector<ReppWindow> windows;
    std::vector<std::vector<std::uint64_t>> counts; ///< [window][trial]
    std::vector<double> gaps;                       ///< inter-exceedance gaps / a_n

    // Statistics of windows[0].
    double mean = 0.0;
    double dispersion = 0.0;
    stats::ChiSquared chi2;
    double gap_ks = 0.0;
    std::vector<std::string> warnings;
};

/// N_n(I) = #{j in a_n I : X_j > u} with a_n = 1/mass, over consecutive
/// trial blocks of the recorded orbits.
ReppCounts repp(const ExceedanceRecord& record, std::size_t level, const std::vector<ReppWindow>& windows,
                std::size_t max_trials = 0);

/// The same statistics for a unit-rate Poisson process (synthetic control).
ReppCounts synthetic_poisson_repp(const std::vector<ReppWindow>& windows, std::size_t trials, std::uint64_t seed);

} // namespace lorenzlab
