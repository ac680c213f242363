// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/maps.hpp"
#include "lorenzlab/parallel.hpp"
#include "lorenzlab/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lorenzlab {

/// Lipschitz observables for correlation estimates.
struct CorrObservable {
    enum class Kind { x, y, constant, bump };
    Kind kind = Kind::x;
    SectionPoint center{}; ///< bump center
    double width = 0.1;    ///< bump support radius
    double level = 1.0;    ///< value of the constant observable

    /// Smooth bump exp(1 - 1/(1 - (d/w)^2)) for d < w, else 0.
    double operator()(SectionPoint p) const;
};

std::string_view to_string(CorrObservable::Kind kind);
CorrObservable::Kind parse_corr_kind(std::string_view name);

struct CorrRow {
    std::size_t lag = 0;
    double value = 0.0; ///< C(n) = <psi (psi o F^n)> - <psi>^2
    double sigma = 0.0; ///< standard error over members
};

struct CorrEstimate {
    std::vector<CorrRow> rows; ///< lags 0..max_lag
    double mean = 0.0;
    double variance = 0.0;     ///< C(0)
    double noise_floor = 0.0;  ///< 3 L^-1/2 Var(psi)
    std::size_t fit_first = 1;
    std::size_t fit_last = 0;  ///< last lag of the fit window (0: no window)
    stats::LinearFit fit;      ///< log |C(n)| against n over the window
    double rate = 0.0;         ///< -slope, reported only when decaying
    bool decaying = false;
    std::vector<std::string> warnings;
};

/// Correlations along `members` orbits of total length L (two passes: the
/// mean first, then centered lag products).
CorrEstimate corr_estimate(MapKind kind, const ModelParams& params, const CorrObservable& psi, std::size_t max_lag,
                           std::size_t length, std::uint64_t seed, std::size_t members = 10,
                           Exec exec = Exec::parallel);

/// Fits log |C(n)| over lags 1.. while |C(n)| stays at or above
/// est.noise_floor; fills fit_last, fit, rate, decaying and warnings.
void fit_envelope(CorrEstimate& est);

} // namespace lorenzlab
