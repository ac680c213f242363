// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/measure.hpp"

#include "lorenzlab/errors.hpp"
#include "lorenzlab/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace lorenzlab {

std::string_view to_string(Shape shape) { return shape == Shape::ball ? "ball" : "square"; }

Shape parse_shape(std::string_view name)
{
    if (name == "ball") return Shape::ball;
    if (name == "square") return Shape::square;
    throw ValidationError("unknown shape '" + std::string(name) + "' (expected ball or square)");
}

// ---------------------------------------------------------------------------
// EmpiricalMeasure

EmpiricalMeasure::QPoint EmpiricalMeasure::quantize(SectionPoint p)
{
    auto q = [](double v) {
        const double s = std::floor((v + 0.5) * 0x1.0p32);
        if (!(s >= 0.0)) return std::uint32_t{0};
        if (s >= 0x1.0p32) return std::uint32_t{0xffffffffu};
        return static_cast<std::uint32_t>(s);
    };
    return {q(p.x), q(p.y)};
}

EmpiricalMeasure::EmpiricalMeasure(std::span<const SectionPoint> points, int cell_exponent)
    : EmpiricalMeasure(points, cell_exponent, Meta{})
{
}

EmpiricalMeasure::EmpiricalMeasure(std::span<const SectionPoint> points, int cell_exponent, Meta meta)
{
    std::vector<QPoint> raw;
    raw.reserve(points.size());
    for (const auto& p : points) {
        if (!(std::abs(p.x) <= 0.5 && std::abs(p.y) <= 0.5)) throw DomainError("EmpiricalMeasure: point outside I x I");
        raw.push_back(quantize(p));
    }
    *this = from_quantized(std::move(raw), cell_exponent, meta);
}

EmpiricalMeasure EmpiricalMeasure::from_quantized(std::vector<QPoint> raw, int cell_exponent, Meta meta)
{
    if (cell_exponent < 1 || cell_exponent > 12) throw ValidationError("cell exponent must be in [1, 12]");
    if (raw.empty()) throw EstimationError("empirical measure needs at least one sample");
    EmpiricalMeasure m;
    m.cell_exponent_ = cell_exponent;
    m.meta_ = meta;
    const std::size_t S = m.cells_per_side();
    m.offsets_.assign(S * S + 1, 0);
    for (const auto& q : raw) ++m.offsets_[m.cell_of(q.x) * S + m.cell_of(q.y) + 1];
    for (std::size_t c = 0; c < S * S; ++c) m.offsets_[c + 1] += m.offsets_[c];

    m.points_.resize(raw.size());
    std::vector<std::uint64_t> cursor(m.offsets_.begin(), m.offsets_.end() - 1);
    for (const auto& q : raw) m.points_[cursor[m.cell_of(q.x) * S + m.cell_of(q.y)]++] = q;
    m.build_summed_area();
    return m;
}

void EmpiricalMeasure::build_summed_area()
{
    const std::size_t S = cells_per_side();
    summed_.assign((S + 1) * (S + 1), 0);
    for (std::size_t ix = 0; ix < S; ++ix) {
        std::uint64_t row = 0;
        for (std::size_t iy = 0; iy < S; ++iy) {
            row += cell_count(ix, iy);
            summed_[(ix + 1) * (S + 1) + iy + 1] = summed_[ix * (S + 1) + iy + 1] + row;
        }
    }
}

std::uint64_t EmpiricalMeasure::block_count(std::size_t x0, std::size_t x1, std::size_t y0, std::size_t y1) const
{
    // Inclusive cell ranges.
    const std::size_t W = cells_per_side() + 1;
    return summed_[(x1 + 1) * W + y1 + 1] - summed_[x0 * W + y1 + 1] - summed_[(x1 + 1) * W + y0] + summed_[x0 * W + y0];
}

template <class CellFn, class PointFn>
void EmpiricalMeasure::scan(SectionPoint c, double r, Shape shape, bool whole_cells, CellFn&& on_cell,
                            PointFn&& on_point) const
{
    const auto S = static_cast<long long>(cells_per_side());
    const double h = cell_side();
    auto index = [&](double v) {
        const double f = std::floor((v + 0.5) * static_cast<double>(S));
        return static_cast<long long>(std::clamp(f, 0.0, static_cast<double>(S - 1)));
    };
    const long long ix0 = index(c.x - r), ix1 = index(c.x + r);
    const long long iy0 = index(c.y - r), iy1 = index(c.y + r);
    // Cells are classified with a relative margin; anything near the
    // boundary falls through to exact per-point tests.
    const double r_in = r * (1.0 - 1e-12);
    const double r_out = r * (1.0 + 1e-12) + 1e-300;

    auto combine = [shape](double a, double b) { return shape == Shape::ball ? std::sqrt(a * a + b * b) : std::max(a, b); };

    for (long long ix = ix0; ix <= ix1; ++ix) {
        const double xl = static_cast<double>(ix) * h - 0.5;
        const double xh = xl + h;
        const double dxn = std::max({0.0, xl - c.x, c.x - xh});
        const double dxf = std::max(std::abs(xl - c.x), std::abs(xh - c.x));
        for (long long iy = iy0; iy <= iy1; ++iy) {
            const double yl = static_cast<double>(iy) * h - 0.5;
            const double yh = yl + h;
            const double dyn = std::max({0.0, yl - c.y, c.y - yh});
            if (combine(dxn, dyn) > r_out) continue;
            const std::size_t cell = static_cast<std::size_t>(ix) * static_cast<std::size_t>(S) + static_cast<std::size_t>(iy);
            const std::uint64_t begin = offsets_[cell];
            const std::uint64_t end = offsets_[cell + 1];
            if (begin == end) continue;
            if (whole_cells) {
                const double dyf = std::max(std::abs(yl - c.y), std::abs(yh - c.y));
                if (combine(dxf, dyf) < r_in) {
                    on_cell(end - begin);
                    continue;
                }
            }
            for (std::uint64_t k = begin; k < end; ++k) {
                const double d = shape_distance(dequantize(points_[k]), c, shape);
                if (d <= r) on_point(d);
            }
        }
    }
}

std::size_t EmpiricalMeasure::count_within(SectionPoint center, double r, Shape shape) const
{
    if (!(r >= 0.0)) throw DomainError("count_within: radius must be nonnegative");
    // Every sample is within distance sqrt(2) (ball) or 1 (square) of any
    // center in I x I.
    const double far = shape_distance({center.x < 0 ? 0.5 : -0.5, center.y < 0 ? 0.5 : -0.5}, center, shape);
    if (r >= far) return size();
    std::size_t count = 0;
    scan(center, r, shape, true, [&](std::uint64_t n) { count += n; }, [&](double) { ++count; });
    return count;
}

std::size_t EmpiricalMeasure::count_within_bruteforce(SectionPoint center, double r, Shape shape) const
{
    std::size_t count = 0;
    for (const auto& q : points_) {
        if (shape_distance(dequantize(q), center, shape) <= r) ++count;
    }
    return count;
}

RadialProfile EmpiricalMeasure::radial_profile(SectionPoint center, Shape shape, double r_max) const
{
    if (!(r_max > 0.0)) throw DomainError("radial_profile: r_max must be positive");
    std::vector<double> d;
    scan(center, r_max, shape, false, [](std::uint64_t) {}, [&](double v) { d.push_back(v); });
    std::sort(d.begin(), d.end());
    return RadialProfile(center, shape, r_max, size(), std::move(d));
}

RadialProfile EmpiricalMeasure::nearest(SectionPoint center, Shape shape, std::size_t k) const
{
    if (k == 0 || k > size()) throw ResolutionError("nearest: requested more samples than the measure holds");
    const std::size_t S = cells_per_side();
    auto index = [&](double v) {
        const double f = std::floor((v + 0.5) * static_cast<double>(S));
        return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(S - 1)));
    };
    const std::size_t cx = index(center.x), cy = index(center.y);
    auto block = [&](std::size_t R) {
        const std::size_t x0 = cx >= R ? cx - R : 0, x1 = std::min(S - 1, cx + R);
        const std::size_t y0 = cy >= R ? cy - R : 0, y1 = std::min(S - 1, cy + R);
        return std::array<std::size_t, 4>{x0, x1, y0, y1};
    };
    std::size_t lo = 0, hi = S;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const auto b = block(mid);
        if (block_count(b[0], b[1], b[2], b[3]) >= k) hi = mid;
        else lo = mid + 1;
    }
    // Every sample in the block lies within the block's farthest corner.
    const auto b = block(lo);
    const double h = cell_side();
    const double xl = static_cast<double>(b[0]) * h - 0.5, xh = static_cast<double>(b[1] + 1) * h - 0.5;
    const double yl = static_cast<double>(b[2]) * h - 0.5, yh = static_cast<double>(b[3] + 1) * h - 0.5;
    const double dx = std::max(std::abs(xl - center.x), std::abs(xh - center.x));
    const double dy = std::max(std::abs(yl - center.y), std::abs(yh - center.y));
    const double rho = (shape == Shape::ball ? std::sqrt(dx * dx + dy * dy) : std::max(dx, dy)) * (1.0 + 1e-9);
    return radial_profile(center, shape, rho);
}

namespace {

constexpr char kMagic[8] = {'L', 'Z', 'L', 'M', 'E', 'A', 'S', '\0'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <class T>
void put(std::ostream& os, const T& v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw ValidationError("measure snapshot: truncated file");
    return v;
}

} // namespace

void EmpiricalMeasure::save(std::ostream& os) const
{
    os.write(kMagic, sizeof kMagic);
    put(os, kSnapshotVersion);
    put(os, static_cast<std::uint32_t>(cell_exponent_));
    put(os, static_cast<std::uint32_t>(meta_.system));
    put(os, meta_.params_hash);
    put(os, meta_.seed);
    put(os, meta_.burn_in);
    put(os, meta_.members);
    put(os, meta_.truncated_members);
    put(os, static_cast<std::uint64_t>(points_.size()));
    const std::size_t cells = cells_per_side() * cells_per_side();
    for (std::size_t c = 0; c < cells; ++c) put(os, offsets_[c + 1] - offsets_[c]);
    os.write(reinterpret_cast<const char*>(points_.data()), static_cast<std::streamsize>(points_.size() * sizeof(QPoint)));
    if (!os) throw Error("measure snapshot: write failed");
}

EmpiricalMeasure EmpiricalMeasure::load(std::istream& is)
{
    char magic[sizeof kMagic];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw ValidationError("measure snapshot: bad magic");
    if (const auto v = get<std::uint32_t>(is); v != kSnapshotVersion) {
        throw ValidationError("measure snapshot: unsupported version " + std::to_string(v));
    }
    EmpiricalMeasure m;
    m.cell_exponent_ = static_cast<int>(get<std::uint32_t>(is));
    if (m.cell_exponent_ < 1 || m.cell_exponent_ > 12) throw ValidationError("measure snapshot: bad cell exponent");
    m.meta_.system = static_cast<MapKind>(get<std::uint32_t>(is));
    m.meta_.params_hash = get<std::uint64_t>(is);
    m.meta_.seed = get<std::uint64_t>(is);
    m.meta_.burn_in = get<std::uint64_t>(is);
    m.meta_.members = get<std::uint64_t>(is);
    m.meta_.truncated_members = get<std::uint64_t>(is);
    const auto n = get<std::uint64_t>(is);
    const std::size_t cells = m.cells_per_side() * m.cells_per_side();
    m.offsets_.assign(cells + 1, 0);
    for (std::size_t c = 0; c < cells; ++c) m.offsets_[c + 1] = m.offsets_[c] + get<std::uint64_t>(is);
    if (m.offsets_.back() != n) throw ValidationError("measure snapshot: cell counts do not sum to sample count");
    m.points_.resize(n);
    is.read(reinterpret_cast<char*>(m.points_.data()), static_cast<std::streamsize>(n * sizeof(QPoint)));
    if (!is) throw ValidationError("measure snapshot: truncated sample block");
    const std::size_t S = m.cells_per_side();
    for (std::size_t c = 0; c < cells; ++c) {
        for (auto k = m.offsets_[c]; k < m.offsets_[c + 1]; ++k) {
            if (m.cell_of(m.points_[k].x) * S + m.cell_of(m.points_[k].y) != c) {
                throw ValidationError("measure snapshot: sample stored in the wrong cell");
            }
        }
    }
    m.build_summed_area();
    return m;
}

void EmpiricalMeasure::save(const std::string& path) const
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    save(os);
}

EmpiricalMeasure EmpiricalMeasure::load(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    return load(is);
}

// ---------------------------------------------------------------------------
// RadialProfile

RadialProfile::RadialProfile(SectionPoint center, Shape shape, double r_max, std::size_t total,
                             std::vector<double> distances)
    : center_(center), shape_(shape), r_max_(r_max), total_(total), distances_(std::move(distances))
{
}

std::size_t RadialProfile::count(double r) const
{
    if (r > r_max_) throw DomainError("RadialProfile::count: radius beyond the profile's r_max");
    return static_cast<std::size_t>(std::upper_bound(distances_.begin(), distances_.end(), r) - distances_.begin());
}

std::size_t RadialProfile::samples_for(double target_mass) const
{
    const double want = target_mass * static_cast<double>(total_);
    return static_cast<std::size_t>(std::ceil(want - 1e-9 * std::max(1.0, want)));
}

double RadialProfile::invert(double target_mass) const
{
    if (!(target_mass > 0.0 && target_mass < 1.0)) throw DomainError("invert: target mass must lie in (0, 1)");
    const std::size_t k = std::max<std::size_t>(1, samples_for(target_mass));
    if (k < kMinBallSamples) {
        throw ResolutionError("target mass " + std::to_string(target_mass) + " rests on " + std::to_string(k) +
                              " samples (< " + std::to_string(kMinBallSamples) + ")");
    }
    if (k > distances_.size()) throw ResolutionError("invert: target mass beyond the profile's r_max");
    return distances_[k - 1];
}

// ---------------------------------------------------------------------------
// Operations

EmpiricalMeasure build_empirical_measure(MapKind kind, const ModelParams& params, std::size_t n, std::size_t burn_in,
                                         std::uint64_t seed, const MeasureOptions& options)
{
    if (n < 100000) throw DomainError("build_empirical_measure: n must be >= 1e5");
    if (burn_in < 1000) throw DomainError("build_empirical_measure: burn_in must be >= 1e3");
    if (options.members == 0 || options.members > n) throw DomainError("build_empirical_measure: bad member count");
    if (kind == MapKind::lorenz) params.validate();

    const std::size_t members = options.members;
    std::vector<std::size_t> start(members + 1, 0);
    for (std::size_t i = 0; i < members; ++i) start[i + 1] = start[i] + n / members + (i < n % members ? 1 : 0);

    std::vector<EmpiricalMeasure::QPoint> raw(n);
    std::vector<std::size_t> produced(members, 0);
    for_each_member(options.exec, members, [&](std::size_t i) {
        auto stepper = random_stepper(kind, params, RandomStream(seed, StreamPurpose::measure, i), burn_in);
        visit_stepper(stepper, [&](auto& s) {
            auto run = for_each_point(s, start[i + 1] - start[i], [&](std::size_t j, SectionPoint p) {
                raw[start[i] + j] = EmpiricalMeasure::quantize(p);
            });
            produced[i] = run.points;
        });
    });

    EmpiricalMeasure::Meta meta;
    meta.system = kind;
    meta.params_hash = params.hash();
    meta.seed = seed;
    meta.burn_in = burn_in;
    meta.members = members;
    std::size_t write = 0;
    for (std::size_t i = 0; i < members; ++i) {
        if (produced[i] < start[i + 1] - start[i]) ++meta.truncated_members;
        if (write != start[i]) std::copy_n(raw.begin() + static_cast<std::ptrdiff_t>(start[i]), produced[i], raw.begin() + static_cast<std::ptrdiff_t>(write));
        write += produced[i];
    }
    raw.resize(write);
    raw.shrink_to_fit();
    return EmpiricalMeasure::from_quantized(std::move(raw), options.cell_exponent, meta);
}

double ball_mass(const EmpiricalMeasure& m, SectionPoint center, double r, Shape shape)
{
    if (!(r > 0.0)) throw DomainError("ball_mass: radius must be positive");
    return static_cast<double>(m.count_within(center, r, shape)) / static_cast<double>(m.size());
}

double invert_mass(const EmpiricalMeasure& m, SectionPoint center, double target_mass, Shape shape)
{
    if (!(target_mass > 0.0 && target_mass < 1.0)) throw DomainError("invert_mass: target mass must lie in (0, 1)");
    const double want = target_mass * static_cast<double>(m.size());
    const auto k = static_cast<std::size_t>(std::ceil(want - 1e-9 * std::max(1.0, want)));
    if (k < kMinBallSamples) {
        throw ResolutionError("invert_mass: target " + std::to_string(target_mass) + " needs " + std::to_string(k) +
                              " samples (< " + std::to_string(kMinBallSamples) + ")");
    }
    return m.nearest(center, shape, k).invert(target_mass);
}

double annulus_mass(const EmpiricalMeasure& m, SectionPoint center, double r, double eps, Shape shape)
{
    if (!(r > 0.0) || !(eps >= 0.0)) throw DomainError("annulus_mass: need r > 0 and eps >= 0");
    if (eps == 0.0) return 0.0;
    const auto outer = m.count_within(center, r + eps, shape);
    const auto inner = m.count_within(center, r, shape);
    return static_cast<double>(outer - inner) / static_cast<double>(m.size());
}

LocalDimensionEstimate local_dimension(const RadialProfile& profile, double r_max, double r_min)
{
    if (!(r_min > 0.0) || !(r_max > r_min)) throw DomainError("local_dimension: need 0 < r_min < r_max");
    if (r_min < 2.0 * EmpiricalMeasure::resolution()) throw DomainError("local_dimension: r_min below sample resolution");
    if (r_max > profile.r_max()) throw DomainError("local_dimension: profile does not reach r_max");
    std::vector<double> radii;
    for (double r = r_max; r >= r_min * (1.0 - 1e-12); r *= 0.5) radii.push_back(r);
    if (radii.size() < 8) throw DomainError("local_dimension: need >= 8 dyadic radii between r_min and r_max");

    LocalDimensionEstimate est;
    est.center = profile.center();
    std::vector<double> lx, ly;
    for (double r : radii) {
        const std::size_t k = profile.count(r);
        if (k < kMinBallSamples) {
            ++est.excluded;
            continue;
        }
        const double mass = static_cast<double>(k) / static_cast<double>(profile.total());
        est.radii.push_back(r);
        est.masses.push_back(mass);
        lx.push_back(std::log(r));
        ly.push_back(std::log(mass));
    }
    if (est.radii.size() < 4) throw EstimationError("local_dimension: fewer than 4 radii hold >= 50 samples");
    const auto fit = stats::linear_fit(lx, ly);
    est.dimension = fit.slope;
    est.log_c = fit.intercept;
    est.r2 = fit.r2;
    return est;
}

LocalDimensionEstimate local_dimension(const EmpiricalMeasure& m, SectionPoint center, double r_max, double r_min,
                                       Shape shape)
{
    return local_dimension(m.radial_profile(center, shape, r_max), r_max, r_min);
}

} // namespace lorenzlab
