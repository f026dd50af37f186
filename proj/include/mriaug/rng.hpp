#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace mriaug {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Pure function of (key, counter), so any draw can be addressed directly by
// index without advancing shared state.

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += w0;
            key[1] += w1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// splitmix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed of the independent stream for item `index` of a batch started from `base_seed`.
constexpr std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return mix64(base_seed ^ mix64(index + 0x9E3779B97F4A7C15ull));
}

/// 53-bit uniform in [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Box-Muller on two raw 64-bit words; one standard normal.
inline double box_muller(std::uint64_t a, std::uint64_t b) noexcept {
    const double u1 = 1.0 - to_unit(a); // (0, 1]
    const double u2 = to_unit(b);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Random-access draws for per-voxel noise: the value for `index` depends
/// only on (seed, stream, index).
class IndexedNormal {
public:
    IndexedNormal(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)), stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::array<std::uint64_t, 2> raw(std::uint64_t index) const noexcept {
        const auto b = philox4x32_10(
            {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream_lo_, stream_hi_}, key_);
        return {(static_cast<std::uint64_t>(b[1]) << 32) | b[0], (static_cast<std::uint64_t>(b[3]) << 32) | b[2]};
    }

    double normal(std::uint64_t index) const noexcept {
        const auto r = raw(index);
        return box_muller(r[0], r[1]);
    }

    /// Uniform in [-1, 1).
    double symmetric_uniform(std::uint64_t index) const noexcept { return 2.0 * to_unit(raw(index)[0]) - 1.0; }

private:
    PhiloxKey key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
};

/// Sequential generator over one (seed, stream) pair. Not shareable between
/// threads; make one per sample.
class SeededRng {
public:
    using result_type = std::uint64_t;

    explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : seed_(seed), stream_(stream), key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    std::uint64_t operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept {
        if (buffered_ == 0) {
            const auto b = philox4x32_10({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                                          static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                                         key_);
            ++counter_;
            buffer_[0] = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
            buffer_[1] = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
            buffered_ = 2;
        }
        return buffer_[2 - buffered_--];
    }

    /// [0, 1)
    double uniform01() noexcept { return to_unit(next_u64()); }

    /// [lo, hi]; returns lo exactly when lo == hi.
    double uniform(double lo, double hi) noexcept {
        const double u = uniform01();
        if (lo == hi) return lo;
        const double v = lo + (hi - lo) * u;
        return v > hi ? hi : v;
    }

    /// Uniform integer in [lo, hi] inclusive, unbiased (rejection).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1u;
        if (range == 0) return static_cast<std::int64_t>(next_u64()); // full 64-bit span
        const std::uint64_t threshold = (0 - range) % range;
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x >= threshold) return lo + static_cast<std::int64_t>(x % range);
        }
    }

    double normal() noexcept {
        const std::uint64_t a = next_u64();
        const std::uint64_t b = next_u64();
        return box_muller(a, b);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    PhiloxKey key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
};

} // namespace mriaug
