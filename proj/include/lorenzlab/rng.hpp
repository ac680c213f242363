// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace lorenzlab {

/// Philox-4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Stateless: maps (counter, key) to 128 random bits.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }
};

/// SplitMix64 finalizer; used to derive stream identifiers.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stream identifier for (purpose, index) pairs, e.g. (trial stream, 17).
constexpr std::uint64_t stream_key(std::uint64_t purpose, std::uint64_t index)
{
    return mix64(mix64(purpose) ^ index);
}

/// Well-known purposes, so independent uses of one master seed never share
/// a stream.
enum class StreamPurpose : std::uint64_t {
    measure = 1,
    start = 2,
    trial = 3,
    member = 4,
    tail_bits = 5,
    center = 6,
    resample = 7,
    synthetic = 8,
    flow_start = 9,
};

constexpr std::uint64_t stream_key(StreamPurpose purpose, std::uint64_t index)
{
    return stream_key(static_cast<std::uint64_t>(purpose), index);
}

/// Counter-based random stream keyed by (master seed, stream id).
///
/// The n-th 128-bit block of a stream is Philox(counter = (n, stream id),
/// key = master seed), so any stream is reproducible without touching any
/// other, regardless of how work is scheduled. Satisfies
/// UniformRandomBitGenerator.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)},
          stream_{static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)}
    {
    }

    RandomStream(std::uint64_t master_seed, StreamPurpose purpose, std::uint64_t index)
        : RandomStream(master_seed, stream_key(purpose, index))
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }

    std::uint32_t next_u32()
    {
        if (used_ == 4) refill();
        return buffer_[used_++];
    }

    std::uint64_t next_u64()
    {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as an argument to log.
    double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), bound > 0 (Lemire's method).
    std::uint64_t below(std::uint64_t bound)
    {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    std::uint64_t blocks_used() const { return block_; }

private:
    void refill()
    {
        buffer_ = Philox4x32::block(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_[0], stream_[1]},
            key_);
        ++block_;
        used_ = 0;
    }

    Philox4x32::Key key_;
    std::array<std::uint32_t, 2> stream_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int used_ = 4;
};

} // namespace lorenzlab
