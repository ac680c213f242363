// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lorenzlab {

/// Constants of the geometric Lorenz model.
///
/// The flow near the origin has eigenvalues lambda2 < lambda3 < 0 < lambda1;
/// the return map exponents alpha = -lambda3/lambda1 and
/// beta = -lambda2/lambda1 are derived, never stored, so they cannot drift
/// out of sync with the eigenvalues.
struct ModelParams {
    double lambda1 = 1.0;
    double lambda2 = -2.0;
    double lambda3 = -0.6;
    double theta = 1.4;
    double b0 = -0.5;
    double b1 = 0.5;
    double g_kappa = 1.0;
    double g_c = 0.25;
    double tau0 = 1.0;

    double alpha() const { return -lambda3 / lambda1; }
    double beta() const { return -lambda2 / lambda1; }

    /// Returns one human-readable line per violated constraint; empty when
    /// the parameters are admissible.
    std::vector<std::string> violations() const;

    /// Throws ValidationError naming every violated constraint.
    void validate() const;

    /// FNV-1a over the bit patterns of all fields, in declaration order.
    std::uint64_t hash() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

std::string to_hex(std::uint64_t value);

} // namespace lorenzlab
