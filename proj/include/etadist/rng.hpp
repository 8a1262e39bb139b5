#pragma once

// Counter-based Philox4x32-10 generator. A block of four 32-bit outputs is
// a pure function of (counter, key), so any draw can be regenerated
// independently of evaluation order or thread layout.

#include <array>
#include <cstdint>

namespace etadist {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace detail {

inline void philox_round(PhiloxCounter& c, const PhiloxKey& k)
{
    constexpr std::uint64_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    std::uint64_t p0 = m0 * c[0], p1 = m1 * c[2];
    auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace detail

inline PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key)
{
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        detail::philox_round(ctr, key);
    }
    return ctr;
}

inline PhiloxKey philox_key(std::uint64_t seed) { return {std::uint32_t(seed), std::uint32_t(seed >> 32)}; }

// Uniform double in (0, 1) from 32 bits, never 0 or 1.
inline double to_unit(std::uint32_t u) { return (double(u) + 0.5) * 0x1p-32; }

} // namespace etadist
