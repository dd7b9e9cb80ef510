#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mflq {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A block is a pure function of (counter, key), so the draw for
/// (seed, path, step) is identical no matter how paths are batched or
/// scheduled across threads.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

/// One 64-bit word keyed by (seed, path, step, stream).
inline std::uint64_t counter_rng_u64(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                                     std::uint32_t stream) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
        static_cast<std::uint32_t>(path), stream};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const auto out = Philox4x32::block(ctr, key);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

/// Uniform draw strictly inside (0, 1): 53 mantissa bits plus a half-ulp
/// offset, so the inverse CDF below never sees 0 or 1.
inline double counter_rng_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                                  std::uint32_t stream) {
    const std::uint64_t bits = counter_rng_u64(seed, path, step, stream) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1p-53;
}

/// Inverse of the standard normal CDF: Acklam's rational approximation
/// refined with one Halley step through erfc, accurate to ~1e-15 over
/// (0, 1).
inline double normal_icdf(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    static constexpr double plow = 0.02425;

    double x;
    if (p < plow) {
        const double u = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    } else if (p <= 1.0 - plow) {
        const double u = p - 0.5;
        const double t = u * u;
        x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * u /
            (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
    } else {
        const double u = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }

    // Halley refinement against the exact CDF.
    static constexpr double inv_sqrt2 = 0.70710678118654752440;
    static constexpr double sqrt_2pi = 2.50662827463100050242;
    const double e = 0.5 * std::erfc(-x * inv_sqrt2) - p;
    const double g = e * sqrt_2pi * std::exp(0.5 * x * x);
    return x - g / (1.0 + 0.5 * x * g);
}

inline double counter_rng_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                                 std::uint32_t stream) {
    return normal_icdf(counter_rng_uniform(seed, path, step, stream));
}

}  // namespace mflq
