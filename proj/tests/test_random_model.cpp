#include "etadist/random_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace etadist;

namespace {

PrimePowerTable primes_only(const PrimePowerTable& t)
{
    PrimePowerTable r = t;
    r.prime_powers.clear();
    for (const auto& pp : t.prime_powers)
        if (pp.k == 1)
            r.prime_powers.push_back(pp);
    return r;
}

struct Moments {
    double mean, se;
};

template<class F>
Moments sample_mean(const MCSample& s, F&& f)
{
    double sum = 0, sq = 0;
    for (const auto& v : s.values) {
        double x = f(v);
        sum += x;
        sq += x * x;
    }
    double n = double(s.values.size()), mean = sum / n;
    return {mean, std::sqrt(std::max(0.0, sq / n - mean * mean) / n)};
}

} // namespace

TEST(Philox, KnownAnswerVectors)
{
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(UnitCircle, TableMatchesPolar)
{
    const auto& t = detail::unit_circle_table();
    for (std::uint32_t u : {0u, 1u, 65535u, 65536u, 123456789u, 0xffffffffu}) {
        cplx want = std::polar(1.0, two_pi * (double(u) + 0.5) / 4294967296.0);
        EXPECT_LT(std::abs(t(u) - want), 1e-15);
    }
}

TEST(SampleP, EmptyTableGivesZero)
{
    auto t = restrict_table(sieve(10), 1.5);
    auto s = sample_p_my({0.75, 0, 0}, t, 1, 100);
    for (const auto& v : s.values)
        EXPECT_EQ(v, cplx(0));
}

TEST(SampleP, MeanAndVariance)
{
    ModelPoint mp{0.7, 1, 0};
    auto t = sieve(200);
    auto s = sample_p_my(mp, t, 42, 1000000);
    auto re = sample_mean(s, [](cplx v) { return v.real(); });
    auto im = sample_mean(s, [](cplx v) { return v.imag(); });
    EXPECT_LT(std::abs(re.mean), 3 * re.se);
    EXPECT_LT(std::abs(im.mean), 3 * im.se);
    // E (Re P)^2 = E|P|^2 / 2 since E P^2 = 0
    double target = 0.5 * exact_mixed_moment(mp, t, 1, 1).real();
    auto var = sample_mean(s, [](cplx v) { return v.real() * v.real(); });
    EXPECT_LT(std::abs(var.mean - target), 3 * var.se) << var.mean << " vs " << target;
}

TEST(SampleP, DeterministicAcrossThreadCounts)
{
    auto t = sieve(1000);
    set_thread_count(1);
    auto a = sample_p_my({0.75, 0, 0}, t, 9, 5000);
    set_thread_count(4);
    auto b = sample_p_my({0.75, 0, 0}, t, 9, 5000);
    set_thread_count(0);
    ASSERT_EQ(a.values.size(), b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i)
        ASSERT_EQ(a.values[i], b.values[i]) << i;
    auto c = sample_p_my({0.75, 0, 0}, t, 10, 5000);
    EXPECT_NE(a.values[0], c.values[0]);
}

TEST(SampleP, ConjugationSymmetry)
{
    auto t = sieve(500);
    auto s1 = sample_p_my({0.75, 0, 0}, t, 1, 200000);
    auto s2 = sample_p_my({0.75, 0, 0}, t, 2, 200000);
    // law of Im P equals law of -Im P; compare independent samples
    auto a = sorted_projections(s1.values, pi / 2);
    auto b = sorted_projections(s2.values, -pi / 2);
    double crit = 1.63 * std::sqrt(2.0 / 200000); // 1% level
    EXPECT_LT(ks_distance(a, b), crit);
}

TEST(MixedMoment, SmallCases)
{
    auto t3 = sieve(3);
    EXPECT_EQ(exact_mixed_moment({1.0, 0, 0}, t3, 1, 0), cplx(0));
    EXPECT_NEAR(exact_mixed_moment({1.0, 0, 0}, t3, 1, 1).real(), 1.0 / 4 + 1.0 / 9, 1e-15);
    EXPECT_EQ(exact_mixed_moment({1.0, 0, 0}, t3, 0, 0), cplx(1));
    // E P^2 conj(P)^0 vanishes, E P conj(P)^2 too
    auto t10 = sieve(10);
    EXPECT_EQ(exact_mixed_moment({0.75, 1, 0}, t10, 2, 0), cplx(0));
    // 2 * 4 = 8: the pair (2, 4) against 8 contributes to E P^2 conj P
    ModelPoint mp{0.75, 1, 0};
    double w2 = std::pow(2.0, -0.75) / std::log(2.0);
    double w4 = std::pow(4.0, -0.75) / (2 * std::log(4.0));
    double w8 = std::pow(8.0, -0.75) / (3 * std::log(8.0));
    double w3 = std::pow(3.0, -0.75) / std::log(3.0);
    double w9 = std::pow(9.0, -0.75) / (2 * std::log(9.0));
    double want = w2 * w2 * w4 + 2 * w2 * w4 * w8 + w3 * w3 * w9;
    EXPECT_NEAR(exact_mixed_moment(mp, t10, 2, 1).real(), want, 1e-15);
}

TEST(MixedMoment, MatchesMonteCarlo)
{
    ModelPoint mp{0.75, 1, 0};
    auto t = sieve(10);
    double exact = exact_mixed_moment(mp, t, 2, 2).real();
    auto s = sample_p_my(mp, t, 2024, 10000000);
    auto m4 = sample_mean(s, [](cplx v) { return std::norm(v) * std::norm(v); });
    EXPECT_LT(std::abs(m4.mean - exact), 3 * m4.se) << m4.mean << " vs " << exact;
}

TEST(MixedMoment, PrimeOnlyMomentBound)
{
    // E|sum a_p X(p)|^{2k} <= k! (sum |a_p|^2)^k
    for (double y : {10.0, 30.0})
        for (double sigma : {0.6, 0.8})
            for (int m : {0, 1}) {
                auto t = primes_only(sieve(std::int64_t(y)));
                double s2 = 0;
                for (const auto& pp : t.prime_powers)
                    s2 += std::pow(prime_power_weight(pp, sigma, m), 2);
                double fact = 1;
                for (int k = 1; k <= 3; ++k) {
                    fact *= k;
                    double mom = exact_mixed_moment({sigma, m, 0}, t, k, k).real();
                    EXPECT_LE(mom, fact * std::pow(s2, k) * (1 + 1e-12)) << y << " " << k;
                    EXPECT_GT(mom, 0);
                }
            }
}

TEST(MixedMoment, CapacityGuard)
{
    auto t = sieve(10000);
    EXPECT_THROW(exact_mixed_moment({0.75, 0, 0}, t, 2, 1), CapacityError);
    EXPECT_THROW(exact_mixed_moment({0.75, 0, 0}, t, -1, 1), ParameterError);
}

TEST(McTail, Limits)
{
    auto s = sample_p_my({0.75, 0, 0}, sieve(1000), 5, 400000);
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(mc_tail(s, 0, -inf).fraction, 1.0);
    EXPECT_EQ(mc_tail(s, 0, inf).fraction, 0.0);
    // conjugation leaves the law of Im P symmetric about 0
    auto half = mc_tail(s, pi / 2, 0);
    EXPECT_LT(std::abs(half.fraction - 0.5), 3 * half.standard_error);
    auto neg = mc_tail(s, -pi / 2, 0);
    EXPECT_LT(std::abs(neg.fraction - 0.5), 3 * neg.standard_error);
    // Re P is right-skewed (E P^2 conj P > 0), so its median sits below the mean 0
    auto re = mc_tail(s, 0, 0);
    EXPECT_LT(re.fraction, 0.5 - 3 * re.standard_error);
}

TEST(Stats, KsDistanceToCdf)
{
    std::vector<double> xs;
    for (int i = 0; i < 1000; ++i)
        xs.push_back((i + 0.5) / 1000);
    EXPECT_NEAR(ks_distance_to(xs, [](double x) { return x; }), 0.0005, 1e-12);
    EXPECT_DOUBLE_EQ(ks_distance(xs, xs), 0.0);
}
