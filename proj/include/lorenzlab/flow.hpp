// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/evt.hpp"
#include "lorenzlab/maps.hpp"
#include "lorenzlab/parallel.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lorenzlab {

/// Roof function h(p) = -scale log|x| + tau0. scale = 1/lambda1 for the
/// model; scale = 0 gives the constant roof tau0.
struct Roof {
    double scale = 1.0;
    double tau0 = 1.0;

    static Roof from(const ModelParams& params) { return {1.0 / params.lambda1, params.tau0}; }
    static Roof constant(double c) { return {0.0, c}; }

    /// Throws SingularPointError on the singular line when scale > 0.
    double operator()(SectionPoint p) const;
};

/// Point (p, u) of the suspension, 0 <= u < h(p).
struct SuspensionPoint {
    SectionPoint p{};
    double u = 0.0;
};

/// Distance in suspension coordinates, sqrt(d(p, q)^2 + (u - v)^2).
double suspension_distance(const SuspensionPoint& a, const SuspensionPoint& b, Shape metric = Shape::ball);

struct FlowState {
    SuspensionPoint point;
    std::uint64_t returns = 0; ///< applications of (p, h(p)) ~ (F(p), 0)
    bool truncated = false;    ///< base orbit met the singular line
};

/// Flows q forward for time t >= 0.
FlowState advance_flow(MapKind kind, const ModelParams& params, const Roof& roof, const SuspensionPoint& q, double t);

struct ReturnTimeEstimate {
    double mean = 0.0;
    std::vector<std::size_t> checkpoints; ///< 10, 100, ..., n
    std::vector<double> running;          ///< running average at each checkpoint
    bool truncated = false;
};

/// Birkhoff average of h along one orbit of length n from a random start.
ReturnTimeEstimate mean_return_time(MapKind kind, const ModelParams& params, const Roof& roof, std::size_t n,
                                    std::uint64_t seed, std::size_t burn_in = 1000);

/// Smallest distance from x0 to the piece {(p, u) : lo <= u < hi}.
double segment_min_distance(SectionPoint p, double lo, double hi, const SuspensionPoint& x0, Shape metric = Shape::ball);

/// Phi(p) = max of phi = -log d(., x0) over the return segment of p.
double segment_max_phi(const Roof& roof, SectionPoint p, const SuspensionPoint& x0, Shape metric = Shape::ball);

struct FlowOptions {
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    bool zero_start_height = false; ///< start at u = 0 instead of uniform in [0, h(p))
    Exec exec = Exec::parallel;
    std::size_t burn_in = 1000;
};

struct FlowTrial {
    double phi_T = 0.0;     ///< max of phi over flow time [0, T)
    double Phi_N = 0.0;     ///< max of Phi(F^k p), k < N
    double elapsed = 0.0;   ///< flow time covered (T unless truncated)
    std::uint64_t returns = 0;
    double complete_max = 0.0; ///< max of Phi over return segments completed inside [0, T)
    bool truncated = false;
};

struct StabilityRow {
    double epsilon = 0.0;
    double b_term = 0.0; ///< a_n |b_{ceil(n(1+eps))} - b_n|
    double a_term = 0.0; ///< |1 - a_{ceil(n(1+eps))} / a_n|
};

struct FlowMaxReport {
    double horizon = 0.0; ///< T
    std::size_t N = 0;    ///< floor(T / hbar)
    double hbar = 0.0;
    double a_N = 0.0;
    double b_N = 0.0;
    std::vector<FlowTrial> trials;
    std::size_t excluded = 0;
    GumbelKs phi_T_ks;
    GumbelKs Phi_N_ks;
    std::vector<StabilityRow> stability;
    bool stability_decreasing = false;
};

/// Flow maxima over [0, T) with T = N * hbar from points (p, u), p drawn
/// from the map's invariant measure, normalized with a = d and
/// b = (log N + log c)/d from the scaling fit at x0's base point.
FlowMaxReport flow_evl(MapKind kind, const ModelParams& params, const Roof& roof, const SuspensionPoint& x0,
                       std::size_t N, double hbar, const ScalingFit& fit, const FlowOptions& options,
                       const std::vector<double>& stability_eps = {0.1, 0.03, 0.01});

} // namespace lorenzlab
