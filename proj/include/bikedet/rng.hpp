#pragma once

#include <cstdint>

namespace bikedet {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so adding a consumer never perturbs the
// numbers another consumer sees. Frame noise, the background plate and
// actor parameters each get their own stream id.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix64(seed ^ mix64(stream ^ mix64(counter)));
}

// Uniform in [0, 1) with 53 significant bits.
inline double uniform01(std::uint64_t k) {
    return static_cast<double>(k >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t k, double lo, double hi) {
    return lo + (hi - lo) * uniform01(k);
}

// Approximate standard normal as a sum of 12 uniforms minus 6
// (Irwin-Hall). Uses only +,-,* on doubles, so results are identical
// on any IEEE-754 platform; tails are clipped at +-6 sigma which is
// irrelevant for pixel noise.
inline double gaussian(std::uint64_t k) {
    double s = 0.0;
    for (std::uint64_t i = 0; i < 12; ++i) s += uniform01(mix64(k + i * 0x632be59bd9b4e019ULL));
    return s - 6.0;
}

// Integer in [0, n), n > 0. Slight modulo bias is acceptable here.
inline std::uint64_t below(std::uint64_t k, std::uint64_t n) { return k % n; }

}  // namespace rng
}  // namespace bikedet
