#pragma once

// The random model P_{m,Y}(sigma, X) = sum_{p^k <= Y} X(p)^k w(p^k) with
// X(p) independent and uniform on the unit circle: Monte Carlo sampling and
// exact mixed moments from the diagonal condition E[X(a) conj X(b)] = [a = b].

#include "arith.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "specfun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace etadist {

struct MCSample {
    std::uint64_t seed = 0;
    std::int64_t n_samples = 0;
    double sigma = 0;
    int m = 0;
    double cutoff_y = 0;
    std::vector<cplx> values;
};

namespace detail {

// e^{i theta} for theta = 2 pi (u + 1/2) / 2^32, as the product of a coarse
// and a fine table entry.
struct UnitCircleTable {
    std::vector<cplx> coarse, fine;
    UnitCircleTable() : coarse(65536), fine(65536)
    {
        for (int j = 0; j < 65536; ++j) {
            coarse[j] = std::polar(1.0, two_pi * j / 65536.0);
            fine[j] = std::polar(1.0, two_pi * (j + 0.5) / 4294967296.0);
        }
    }
    cplx operator()(std::uint32_t u) const { return coarse[u >> 16] * fine[u & 0xffffu]; }
};

inline const UnitCircleTable& unit_circle_table()
{
    static const UnitCircleTable t;
    return t;
}

// Per-prime weights w(p^k), k = 1.., for the prime powers in the table.
struct PrimeWeights {
    std::vector<std::size_t> offset; // per prime, into weight
    std::vector<double> weight;
};

inline PrimeWeights prime_weights(const PrimePowerTable& table, double sigma, int m)
{
    PrimeWeights pw;
    std::vector<std::vector<double>> per(table.primes.size());
    std::size_t i = 0;
    // prime_powers is sorted by n; locate the prime index by binary search
    for (const auto& pp : table.prime_powers) {
        i = std::lower_bound(table.primes.begin(), table.primes.end(), pp.p) - table.primes.begin();
        auto& v = per[i];
        if (v.size() < pp.k)
            v.resize(pp.k);
        v[pp.k - 1] = prime_power_weight(pp, sigma, m);
    }
    for (const auto& v : per) {
        pw.offset.push_back(pw.weight.size());
        pw.weight.insert(pw.weight.end(), v.begin(), v.end());
    }
    pw.offset.push_back(pw.weight.size());
    return pw;
}

constexpr std::uint32_t sample_stream_tag = 0x6d6f6465u;

using wide = unsigned __int128;

// Distribution of products n_1...n_j over ordered j-tuples of prime powers:
// sorted (product, total weight) pairs.
inline std::vector<std::pair<wide, double>> product_distribution(const PrimePowerTable& table, double sigma,
                                                                  int m, int j)
{
    std::vector<std::pair<wide, double>> cur{{1, 1.0}};
    for (int step = 0; step < j; ++step) {
        std::vector<std::pair<wide, double>> next;
        next.reserve(cur.size() * table.prime_powers.size());
        for (const auto& [a, wa] : cur)
            for (const auto& pp : table.prime_powers) {
                if (a > ~wide(0) / pp.n)
                    throw CapacityError("prime-power product exceeds 128 bits");
                next.emplace_back(a * pp.n, wa * prime_power_weight(pp, sigma, m));
            }
        std::sort(next.begin(), next.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        cur.clear();
        for (const auto& e : next) {
            if (!cur.empty() && cur.back().first == e.first)
                cur.back().second += e.second;
            else
                cur.push_back(e);
        }
    }
    return cur;
}

inline void check_enumeration(const PrimePowerTable& table, int k, int l)
{
    if (k < 0 || l < 0)
        throw ParameterError("moment orders must be non-negative");
    double count = std::pow(double(table.prime_powers.size()), k + l);
    if (count > 1e8)
        throw CapacityError("moment enumeration needs " + std::to_string(count) + " tuples, limit 1e8");
}

} // namespace detail

// n independent realizations of P_{m,Y}(sigma, X) with Y = table.cutoff_y.
// Draw d uses Philox blocks with counter (d, prime group) and key = seed, so
// the output does not depend on the number of threads.
inline MCSample sample_p_my(const ModelPoint& mp, const PrimePowerTable& table, std::uint64_t seed, std::int64_t n)
{
    validate(mp);
    if (n < 1)
        throw ParameterError("sample count must be at least 1");
    MCSample s;
    s.seed = seed;
    s.n_samples = n;
    s.sigma = mp.sigma;
    s.m = mp.m;
    s.cutoff_y = table.cutoff_y;
    s.values.assign(std::size_t(n), cplx(0));
    auto pw = detail::prime_weights(table, mp.sigma, mp.m);
    const auto& circle = detail::unit_circle_table();
    const std::size_t np = table.primes.size();
    const auto key = philox_key(seed);

    parallel_blocks(
        std::size_t(n),
        [&](std::size_t b, std::size_t e) {
            for (std::size_t d = b; d < e; ++d) {
                double re = 0, im = 0;
                PhiloxCounter block{};
                for (std::size_t i = 0; i < np; ++i) {
                    if (i % 4 == 0)
                        block = philox4x32({std::uint32_t(d), std::uint32_t(std::uint64_t(d) >> 32),
                                            std::uint32_t(i / 4), detail::sample_stream_tag},
                                           key);
                    cplx x = circle(block[i % 4]);
                    const double* w = pw.weight.data() + pw.offset[i];
                    std::size_t kmax = pw.offset[i + 1] - pw.offset[i];
                    re += w[0] * x.real();
                    im += w[0] * x.imag();
                    cplx xk = x;
                    for (std::size_t k = 1; k < kmax; ++k) {
                        xk *= x;
                        re += w[k] * xk.real();
                        im += w[k] * xk.imag();
                    }
                }
                s.values[d] = {re, im};
            }
        },
        256);
    return s;
}

// E[P^k conj(P)^l] by enumerating ordered tuples of prime powers and keeping
// those with equal products.
inline cplx exact_mixed_moment(const ModelPoint& mp, const PrimePowerTable& table, int k, int l)
{
    validate(mp);
    detail::check_enumeration(table, k, l);
    auto a = detail::product_distribution(table, mp.sigma, mp.m, k);
    auto b = k == l ? a : detail::product_distribution(table, mp.sigma, mp.m, l);
    double sum = 0;
    std::size_t j = 0;
    for (const auto& [key, wa] : a) {
        while (j < b.size() && b[j].first < key)
            ++j;
        if (j < b.size() && b[j].first == key)
            sum += wa * b[j].second;
    }
    return sum;
}

struct TailEstimate {
    double fraction = 0;
    double standard_error = 0;
};

// Fraction of draws with Re(e^{-i alpha} value) > tau and its binomial
// standard error.
inline TailEstimate mc_tail(const MCSample& s, double alpha, double tau)
{
    if (s.values.empty())
        throw ParameterError("empty sample");
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    std::size_t hits = 0;
    for (const auto& v : s.values)
        if (ca * v.real() + sa * v.imag() > tau)
            ++hits;
    double n = double(s.values.size()), q = hits / n;
    return {q, std::sqrt(q * (1 - q) / n)};
}

// Sorted projections Re(e^{-i alpha} v).
inline std::vector<double> sorted_projections(const std::vector<cplx>& values, double alpha)
{
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values)
        out.push_back(ca * v.real() + sa * v.imag());
    std::sort(out.begin(), out.end());
    return out;
}

// Two-sample Kolmogorov-Smirnov distance of sorted samples.
inline double ks_distance(const std::vector<double>& a, const std::vector<double>& b)
{
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

// sup |F_n(x) - F(x)| of a sorted sample against a continuous CDF.
template<class Cdf>
double ks_distance_to(const std::vector<double>& sorted, Cdf&& cdf)
{
    double n = double(sorted.size()), d = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double f = cdf(sorted[i]);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(i / n - f)});
    }
    return d;
}

} // namespace etadist
