// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/maps.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lorenzlab {

/// Ulam discretization of the transfer operator of a 1D map (Lorenz T or
/// the doubling map) on `bins` equal cells of I: P(i, j) is the fraction of
/// cell i that the map sends into cell j, computed from exact branch
/// inverses.
class UlamOperator {
public:
    UlamOperator(MapKind kind, const ModelParams& params, std::size_t bins);

    std::size_t bins() const { return rows_.size(); }

    /// rho -> rho P (push-forward of cell masses).
    std::vector<double> push_forward(const std::vector<double>& weights) const;

    /// L1 invariance residual ||rho P - rho||_1.
    double residual(const std::vector<double>& weights) const;

    struct Entry {
        std::uint32_t column;
        double value;
    };
    const std::vector<Entry>& row(std::size_t i) const { return rows_[i]; }

private:
    std::vector<std::vector<Entry>> rows_;
};

/// Histogram estimate of the acim: weights over equal cells, summing to 1.
struct UlamDensity {
    enum class Method { power_iteration, orbit_histogram };

    std::size_t bins = 0;
    std::vector<double> weights;
    Method method = Method::power_iteration;
    int iterations = 0;
    double residual = 0.0; ///< ||rho P - rho||_1 at return
    std::vector<std::string> warnings;

    /// Density value on cell i (weight times bin count).
    double density(std::size_t i) const { return weights[i] * static_cast<double>(bins); }
};

struct UlamOptions {
    int max_iterations = 20000;
    double tolerance = 1e-10;
    std::uint64_t seed = 1;  ///< for the orbit-histogram fallback
    std::size_t burn_in = 1000;
};

/// Fixed point of the Ulam operator by power iteration from the uniform
/// density; falls back to an orbit histogram of n samples (with a warning)
/// when the residual does not reach tolerance. bins must be a power of two
/// in [64, 8192].
UlamDensity ulam_acim(MapKind kind, const ModelParams& params, std::size_t bins, std::size_t n,
                      const UlamOptions& options = {});

/// Histogram of an n-point orbit of the 1D map, with its Ulam residual.
UlamDensity orbit_histogram(MapKind kind, const ModelParams& params, std::size_t bins, std::size_t n,
                            std::uint64_t seed, std::size_t burn_in = 1000);

/// max_i |rho(i+1) - rho(i)| * bins, the discrete Lipschitz constant of
/// the density.
double discrete_lipschitz(const UlamDensity& d);

/// sum_i |rho(i+1) - rho(i)|, the discrete total variation of the density.
double total_variation(const UlamDensity& d);

/// L1 distance between two densities; the finer one is averaged down onto
/// the coarser grid.
double l1_distance(const UlamDensity& a, const UlamDensity& b);

} // namespace lorenzlab
