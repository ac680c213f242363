// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/measure.hpp"
#include "lorenzlab/source.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lorenzlab {

/// Nested shrinking targets A_i = shape of radius r(i) at a fixed center,
/// i = 1..N, with measured masses and cumulative expectation E_n.
struct TargetSequence {
    SectionPoint center{};
    Shape shape = Shape::square;
    double gamma1 = 0.6;
    double C = 0.01;
    std::vector<double> radii;      ///< radii[i-1] = r(i), nonincreasing
    std::vector<double> masses;     ///< masses[i-1] = measured mass of A_i
    std::vector<double> cumulative; ///< cumulative[n-1] = E_n
    /// max over i of log(i) times the horizontal extent 2r(i) of A_i.
    double side_condition = 0.0;
    std::vector<std::string> warnings;

    std::size_t size() const { return radii.size(); }
    double expected(std::size_t n) const { return n == 0 ? 0.0 : cumulative[n - 1]; }

    /// Every A_i is the whole section: E_n = n.
    static TargetSequence full_space(std::size_t n);
};

struct TargetOptions {
    double C = 0.01;
    /// E_N below this is flagged as too small to see convergence.
    double expectation_floor = 10.0;
};

/// sum_{i=1}^{N} C i^-gamma1, the planned expectation of a schedule.
double schedule_sum(double C, double gamma1, std::size_t n);

/// r(i) = invert_mass(C i^-gamma1). The sequence is cut short, with a
/// warning, where the target mass falls below the 50-sample floor.
TargetSequence build_targets(const EmpiricalMeasure& m, SectionPoint center, Shape shape, double gamma1, std::size_t n,
                             const TargetOptions& options = {});

/// Checkpoints 10, 100, ... below n, plus n itself.
std::vector<std::size_t> log_checkpoints(std::size_t n, std::size_t first = 10);

struct SbcOptions {
    std::size_t ensemble = 100;
    std::uint64_t seed = 1;
    Exec exec = Exec::parallel;
    bool record_hits = false;
    std::vector<std::size_t> checkpoints; ///< empty: log_checkpoints(n)
};

struct SbcMember {
    std::size_t member = 0;
    std::vector<std::uint64_t> hits; ///< S_n at each checkpoint
    bool truncated = false;
    std::vector<std::uint64_t> hit_times;
};

struct SbcReport {
    std::size_t n = 0;
    std::vector<std::size_t> checkpoints;
    std::vector<double> expected; ///< E_n at each checkpoint
    std::vector<SbcMember> members;
    std::size_t excluded = 0;       ///< members lost to a singular truncation
    std::vector<double> mean_ratio; ///< per checkpoint, over included members
    std::vector<double> std_ratio;

    double terminal_mean() const { return mean_ratio.back(); }
    double terminal_std() const { return std_ratio.back(); }
    /// Terminal S_n/E_n of every included member.
    std::vector<double> terminal_ratios() const;
};

/// S_n = #{1 <= j <= n : F^j(x) in A_j} for `ensemble` random starts x.
SbcReport run_sbc(const OrbitSource& source, const TargetSequence& targets, std::size_t n, const SbcOptions& options);

struct SpOptions {
    std::size_t window = 100;         ///< largest lag j - i
    std::size_t indices = 16;         ///< sampled target indices i
    std::size_t pairs_budget = 4096;  ///< cap on (i, lag) cells
    std::size_t orbit_length = 10000000;
    std::size_t members = 10;
    std::uint64_t seed = 1;
    Exec exec = Exec::parallel;
};

struct SpRow {
    std::size_t i = 0;
    std::size_t lag = 0;
    double joint = 0.0;  ///< E(f_i f_{i+lag})
    double mass_i = 0.0; ///< E(f_i)
    double mass_j = 0.0; ///< E(f_{i+lag})
    double covariance = 0.0;
};

struct SpReport {
    std::size_t n = 0;
    std::size_t window = 0;
    std::vector<SpRow> rows; ///< pooled over members; lag 0 rows are the Bernoulli variances
    /// sum_{i<=n} sum_{1<=lag<=window} cov(f_i, f_{i+lag}) / sum_{i<=n} E f_i
    double normalized_sum = 0.0;
    double sigma = 0.0; ///< standard error over members
    bool partial = false;
    std::vector<std::string> warnings;
};

/// Monte Carlo check of the (SP) second-moment bound over targets 1..n.
/// Since f_i f_j is evaluated on one orbit, E(f_i f_j) is the long-run
/// frequency of x_t in A_i and x_{t+j-i} in A_j.
SpReport sp_diagnostic(const OrbitSource& source, const TargetSequence& targets, std::size_t n,
                       const SpOptions& options);

struct ShortReturnRow {
    double r = 0.0;
    std::size_t j_max = 0;
    std::uint64_t visits = 0;
    std::vector<double> ratio; ///< ratio[j] for j = 0..j_max; ratio[0] = 1
    double sup = 0.0;          ///< max over 1 <= j <= j_max
    std::size_t argsup = 0;
};

/// For the 1D map (lorenz: the quotient T; doubling) the conditional return
/// frequencies m(B_r and T^-j B_r)/m(B_r), j <= ceil(|log r|^5) capped at
/// j_cap, estimated along one orbit of the given length.
std::vector<ShortReturnRow> short_return_profile(MapKind kind, const ModelParams& params, double center,
                                                 const std::vector<double>& radii, std::size_t orbit_length,
                                                 std::uint64_t seed, std::size_t j_cap = 10000);

} // namespace lorenzlab
