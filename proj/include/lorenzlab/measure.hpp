// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lorenzlab/maps.hpp"
#include "lorenzlab/orbit.hpp"
#include "lorenzlab/parallel.hpp"
#include "lorenzlab/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lorenzlab {

/// Target geometry: Euclidean ball, or square (max-metric ball) of side 2r.
enum class Shape { ball, square };

std::string_view to_string(Shape shape);
Shape parse_shape(std::string_view name);

/// Distance from p to c in the metric of the given shape.
inline double shape_distance(SectionPoint p, SectionPoint c, Shape shape)
{
    const double dx = p.x - c.x;
    const double dy = p.y - c.y;
    if (shape == Shape::square) return std::max(std::abs(dx), std::abs(dy));
    return std::sqrt(dx * dx + dy * dy);
}

/// Fewest samples a mass must rest on before it may be used in a fit or an
/// inversion (relative Monte Carlo error ~14%).
inline constexpr std::size_t kMinBallSamples = 50;

class RadialProfile;

/// Orbit-derived surrogate for the invariant measure.
///
/// Samples are quantized to 2^-32 per coordinate and stored in grid-cell
/// order (cell side 2^-cell_exponent) with CSR offsets, so neighborhood
/// queries touch only the cells the shape overlaps. Immutable once built;
/// concurrent queries are safe.
class EmpiricalMeasure {
public:
    struct Meta {
        MapKind system = MapKind::lorenz;
        std::uint64_t params_hash = 0;
        std::uint64_t seed = 0;
        std::uint64_t burn_in = 0;
        std::uint64_t members = 1;
        std::uint64_t truncated_members = 0;
    };

    EmpiricalMeasure() = default;

    /// From explicit points (tests, controls). Points must lie in I x I.
    EmpiricalMeasure(std::span<const SectionPoint> points, int cell_exponent, Meta meta);
    explicit EmpiricalMeasure(std::span<const SectionPoint> points, int cell_exponent = 10);

    std::size_t size() const { return points_.size(); }
    int cell_exponent() const { return cell_exponent_; }
    double cell_side() const { return 1.0 / static_cast<double>(cells_per_side()); }
    std::size_t cells_per_side() const { return std::size_t{1} << cell_exponent_; }
    const Meta& meta() const { return meta_; }

    /// Quantization step of stored coordinates.
    static constexpr double resolution() { return 0x1.0p-32; }

    /// i-th stored sample (cell order), dequantized.
    SectionPoint sample(std::size_t i) const { return dequantize(points_[i]); }

    /// Number of samples with shape_distance(sample, center) <= r.
    std::size_t count_within(SectionPoint center, double r, Shape shape) const;

    /// Reference implementation of count_within: linear scan over all
    /// samples. Used to test the grid index.
    std::size_t count_within_bruteforce(SectionPoint center, double r, Shape shape) const;

    /// Sorted distances of every sample within r_max of center.
    RadialProfile radial_profile(SectionPoint center, Shape shape, double r_max) const;

    /// Smallest radius whose closed shape holds at least k samples, with
    /// the sorted distances of all samples up to that radius.
    RadialProfile nearest(SectionPoint center, Shape shape, std::size_t k) const;

    std::uint64_t cell_count(std::size_t ix, std::size_t iy) const
    {
        const std::size_t c = ix * cells_per_side() + iy;
        return offsets_[c + 1] - offsets_[c];
    }

    void save(std::ostream& os) const;
    static EmpiricalMeasure load(std::istream& is);
    void save(const std::string& path) const;
    static EmpiricalMeasure load(const std::string& path);

    struct QPoint {
        std::uint32_t x;
        std::uint32_t y;
    };

    static QPoint quantize(SectionPoint p);
    static SectionPoint dequantize(QPoint q)
    {
        return {(static_cast<double>(q.x) + 0.5) * resolution() - 0.5,
                (static_cast<double>(q.y) + 0.5) * resolution() - 0.5};
    }

    /// Takes ownership of quantized samples in arbitrary order and sorts
    /// them into cells (stable, so the result is independent of threading).
    static EmpiricalMeasure from_quantized(std::vector<QPoint> raw, int cell_exponent, Meta meta);

private:
    std::size_t cell_of(std::uint32_t q) const { return q >> (32 - cell_exponent_); }
    void build_summed_area();
    std::uint64_t block_count(std::size_t x0, std::size_t x1, std::size_t y0, std::size_t y1) const;

    /// Calls on_cell(count) for cells entirely inside the shape (only when
    /// whole_cells is true) and on_point(distance) for every other sample
    /// that lies inside.
    template <class CellFn, class PointFn>
    void scan(SectionPoint center, double r, Shape shape, bool whole_cells, CellFn&& on_cell,
              PointFn&& on_point) const;

    int cell_exponent_ = 10;
    Meta meta_;
    std::vector<QPoint> points_;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint64_t> summed_; ///< (S+1)x(S+1) summed-area table of cell counts
};

/// Distances from one center, sorted ascending, complete up to r_max.
class RadialProfile {
public:
    RadialProfile() = default;
    RadialProfile(SectionPoint center, Shape shape, double r_max, std::size_t total, std::vector<double> distances);

    SectionPoint center() const { return center_; }
    Shape shape() const { return shape_; }
    double r_max() const { return r_max_; }
    std::size_t total() const { return total_; }
    std::span<const double> distances() const { return distances_; }

    /// Samples within r (closed); requires r <= r_max.
    std::size_t count(double r) const;
    double mass(double r) const { return static_cast<double>(count(r)) / static_cast<double>(total_); }

    /// Smallest r with mass(r) >= target. ResolutionError when fewer than
    /// kMinBallSamples samples would lie inside.
    double invert(double target_mass) const;

    /// Samples needed for target_mass: ceil(target*N).
    std::size_t samples_for(double target_mass) const;

private:
    SectionPoint center_{};
    Shape shape_ = Shape::ball;
    double r_max_ = 0.0;
    std::size_t total_ = 0;
    std::vector<double> distances_;
};

struct MeasureOptions {
    std::size_t members = 1; ///< independent orbits; samples split evenly
    int cell_exponent = 10;
    Exec exec = Exec::parallel;
};

/// Builds the empirical measure from `members` orbits of total length n
/// after burn-in, each member seeded by (seed, member index). Members hit
/// by a singular truncation contribute a shortened sample; see
/// meta().truncated_members.
EmpiricalMeasure build_empirical_measure(MapKind kind, const ModelParams& params, std::size_t n, std::size_t burn_in,
                                         std::uint64_t seed, const MeasureOptions& options = {});

double ball_mass(const EmpiricalMeasure& m, SectionPoint center, double r, Shape shape = Shape::ball);

/// Smallest sample-resolved radius with ball_mass >= target_mass.
double invert_mass(const EmpiricalMeasure& m, SectionPoint center, double target_mass, Shape shape = Shape::ball);

/// Mass of the shell (r, r + eps].
double annulus_mass(const EmpiricalMeasure& m, SectionPoint center, double r, double eps, Shape shape = Shape::ball);

struct LocalDimensionEstimate {
    SectionPoint center{};
    std::vector<double> radii;  ///< radii used in the fit, strictly decreasing
    std::vector<double> masses; ///< empirical masses at those radii
    std::size_t excluded = 0;   ///< radii dropped for holding < kMinBallSamples
    double dimension = 0.0;     ///< regression slope
    double log_c = 0.0;         ///< intercept: log mass ~ log_c + dimension*log r
    double r2 = 0.0;
};

/// Least-squares slope of log mass against log r over dyadic radii
/// r_max*2^-k >= r_min. Needs at least 8 radii in range and 4 usable ones.
LocalDimensionEstimate local_dimension(const EmpiricalMeasure& m, SectionPoint center, double r_max, double r_min,
                                       Shape shape = Shape::ball);

/// Same fit from an existing profile (must reach r_max).
LocalDimensionEstimate local_dimension(const RadialProfile& profile, double r_max, double r_min);

/// Draws i.i.d. points from an empirical measure; has the stepper
/// interface, so every orbit kernel doubles as an independence control.
class ResampleStepper {
public:
    ResampleStepper(const EmpiricalMeasure& m, RandomStream rng) : m_(&m), rng_(std::move(rng)) { step(); }

    SectionPoint point() const { return p_; }

    bool step()
    {
        p_ = m_->sample(static_cast<std::size_t>(rng_.below(m_->size())));
        return true;
    }

private:
    const EmpiricalMeasure* m_;
    RandomStream rng_;
    SectionPoint p_;
};

} // namespace lorenzlab
