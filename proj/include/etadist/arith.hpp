#pragma once

// Primes, prime powers and the von Mangoldt function.

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace etadist {

struct PrimePower {
    std::uint32_t p;
    std::uint32_t k;
    std::uint32_t n; // p^k
    double log_p;
    double log_n;
};

// Immutable table of all primes and prime powers up to cutoff_y.
struct PrimePowerTable {
    double cutoff_y = 0;
    std::vector<std::uint32_t> primes;
    std::vector<PrimePower> prime_powers; // ascending in n
};

namespace detail {

inline std::vector<std::uint32_t> small_primes(std::uint32_t limit)
{
    std::vector<char> composite(limit + 1, 0);
    std::vector<std::uint32_t> out;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i])
            continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i)
            composite[j] = 1;
    }
    return out;
}

// Segmented sieve of Eratosthenes over odd numbers, 2^18 odds per segment.
inline std::vector<std::uint32_t> segmented_primes(std::uint32_t limit)
{
    auto base = small_primes(static_cast<std::uint32_t>(std::sqrt(double(limit))) + 1);
    std::vector<std::uint32_t> out{2};
    const std::uint64_t seg_odds = 1u << 18;
    std::vector<char> mark(seg_odds);
    // segment covers odd numbers lo, lo+2, ..., lo + 2*(seg_odds-1)
    for (std::uint64_t lo = 3; lo <= limit; lo += 2 * seg_odds) {
        std::uint64_t hi = std::min<std::uint64_t>(limit, lo + 2 * (seg_odds - 1));
        std::size_t count = static_cast<std::size_t>((hi - lo) / 2 + 1);
        std::fill(mark.begin(), mark.begin() + count, 0);
        for (std::uint32_t q : base) {
            if (q == 2)
                continue;
            std::uint64_t q2 = std::uint64_t(q) * q;
            if (q2 > hi)
                break;
            std::uint64_t start = std::max(q2, (lo + q - 1) / q * q);
            if (start % 2 == 0)
                start += q;
            for (std::uint64_t j = start; j <= hi; j += 2 * q)
                mark[(j - lo) / 2] = 1;
        }
        for (std::size_t i = 0; i < count; ++i)
            if (!mark[i])
                out.push_back(static_cast<std::uint32_t>(lo + 2 * i));
    }
    return out;
}

} // namespace detail

// Complete table of primes and prime powers up to limit, 3 <= limit <= 1e8.
inline PrimePowerTable sieve(std::int64_t limit)
{
    if (limit < 3 || limit > 100000000)
        throw ParameterError("sieve limit must lie in [3, 1e8], got " + std::to_string(limit));
    auto lim = static_cast<std::uint32_t>(limit);
    PrimePowerTable t;
    t.cutoff_y = double(limit);
    t.primes = lim <= 1000000 ? detail::small_primes(lim) : detail::segmented_primes(lim);

    for (std::uint32_t p : t.primes) {
        double lp = std::log(double(p));
        std::uint64_t n = p;
        for (std::uint32_t k = 1; n <= lim; ++k, n *= p)
            t.prime_powers.push_back({p, k, static_cast<std::uint32_t>(n), lp, k * lp});
    }
    std::sort(t.prime_powers.begin(), t.prime_powers.end(),
              [](const PrimePower& a, const PrimePower& b) { return a.n < b.n; });
    return t;
}

// Table restricted to prime powers <= y (y may be below 3; the table is then
// empty apart from 2 when y >= 2).
inline PrimePowerTable restrict_table(const PrimePowerTable& t, double y)
{
    PrimePowerTable r;
    r.cutoff_y = y;
    for (auto p : t.primes)
        if (p <= y)
            r.primes.push_back(p);
    for (const auto& pp : t.prime_powers)
        if (pp.n <= y)
            r.prime_powers.push_back(pp);
    return r;
}

// log p if n = p^k, else 0.
inline double von_mangoldt(std::int64_t n)
{
    if (n < 2)
        throw ParameterError("von_mangoldt needs n >= 2, got " + std::to_string(n));
    std::int64_t p = n;
    for (std::int64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            p = d;
            break;
        }
    }
    std::int64_t m = n;
    while (m % p == 0)
        m /= p;
    return m == 1 ? std::log(double(p)) : 0.0;
}

} // namespace etadist
