#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>
#include <vector>

namespace gasfc {

/// Deterministic RNG used everywhere randomness is needed (synthetic series,
/// random forest, MLP init and shuffling). The standard library engines are
/// portable but its distributions are not, so both the generator and the
/// distributions are fixed here:
///
///   - stream:   splitmix64 (Steele, Lea & Flood 2014), 64-bit state,
///               next(s) = mix(s += 0x9E3779B97F4A7C15)
///   - uniform double in [0,1): top 53 bits / 2^53
///   - bounded integers: rejection sampling on the high bits
///   - gaussians: Box-Muller on two uniforms, cached second value
///
/// Identical seeds give identical sequences on any platform, which keeps
/// generated series and fitted models reproducible across ports.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound), bound > 0. Rejection keeps it unbiased.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % bound;
    }

    /// Standard normal via Box-Muller; consumes two uniforms per pair.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();  // log(0) guard
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Fisher-Yates, iterating i = n-1..1, j = next_below(i+1).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Combines a base seed with context ids into a child seed. Backtest tasks
/// derive their seeds from (series, year, model, fold) through this, so
/// results never depend on scheduling order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    Rng r(seed ^ (salt * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    return r.next_u64();
}

}  // namespace gasfc
