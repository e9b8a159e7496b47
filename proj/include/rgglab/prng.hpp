#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace rgglab {

// SplitMix64 finalizer. Bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Pre-mixing h breaks the additive symmetry of (h + v), so neighboring
// (seed, index) pairs cannot alias across fields.
inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(mix64(h + 0x9E3779B97F4A7C15ULL) ^ v);
}

inline std::uint64_t hash_str(std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) h = hash_combine(h, c);
    return hash_combine(h, s.size());
}

// Counter-based stream: state advances by a fixed odd increment and each
// output is the mixed counter, so streams seeded by distinct mixes are
// independent and generation order never matters across streams.
class Prng {
public:
    explicit Prng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double next_double_open() { return 1.0 - next_double(); }

    // Standard normal via Box-Muller; the pair is cached.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_double_open();
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.28318530717958647692 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Uniform in [0,1) keyed by an unordered vertex pair. The canonical
// (min,max) ordering makes edge streams relabeling-consistent.
inline double edge_uniform(std::uint64_t seed, std::uint32_t i, std::uint32_t j) {
    const std::uint32_t lo = i < j ? i : j;
    const std::uint32_t hi = i < j ? j : i;
    std::uint64_t h = hash_combine(seed, (static_cast<std::uint64_t>(lo) << 32) | hi);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace rgglab
