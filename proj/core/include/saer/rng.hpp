#pragma once

#include <cstdint>

namespace saer {

/// 64-bit avalanche finalizer (the splitmix64 output function).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for an independent substream identified by two stream tags.
///
/// The simulator keys every random decision by (run seed, tag_a, tag_b) —
/// e.g. (seed, round, client) for request draws — so draws do not depend on
/// the order in which other entities are processed.
constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t tag_a,
                                  std::uint64_t tag_b) noexcept {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (tag_a + 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ (tag_b + 0xd1b54a32d192ed03ULL));
    return h;
}

/// splitmix64 generator (Steele, Lea & Flood). One 64-bit word of state,
/// full-period, fully deterministic across platforms.
class SplitMix64 {
public:
    constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        return mix64(state_ += 0x9e3779b97f4a7c15ULL);
    }

    /// Unbiased draw in [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t bounded(std::uint64_t n) noexcept {
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                x = next();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace saer
