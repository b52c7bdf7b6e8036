#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace msond {

using Rng = std::mt19937_64;
using cplx = std::complex<double>;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream for (seed, point, trial). Streams never depend on
/// which worker runs the trial.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t point, std::uint64_t trial)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ splitmix64(point + 0x51ed2701f3a5c7b9ULL));
    h = splitmix64(h ^ splitmix64(trial + 0x2545f4914f6cdd1dULL));
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(point), static_cast<std::uint32_t>(trial)};
    return Rng(seq);
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
inline cplx complex_gaussian(Rng& rng)
{
    std::normal_distribution<double> half(0.0, std::sqrt(0.5));
    const double re = half(rng);
    const double im = half(rng);
    return {re, im};
}

/// Counter-based CN(0,1) draw: a pure function of (key, index). Used for
/// fields that are too large to materialize per block.
inline cplx keyed_gaussian(std::uint64_t key, std::uint64_t index) noexcept
{
    const std::uint64_t a = splitmix64(key ^ splitmix64(2 * index));
    const std::uint64_t b = splitmix64(key ^ splitmix64(2 * index + 1));
    // 53-bit uniforms; u1 in (0,1] so the log is finite.
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-std::log(u1));  // E r^2 = 1
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::polar(r, two_pi * u2);
}

}  // namespace msond
