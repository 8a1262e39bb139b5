#pragma once

// Special functions: polylogarithms, the local logarithmic factor of the
// random Euler product, modified Bessel I0 and log I0, the angular function
// lambda_r(theta; m, alpha) with its two critical points, and the
// Beurling-Selberg style kernels used for smoothing rectangle indicators.

#include "errors.hpp"
#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace etadist {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2 * std::numbers::pi;

//---------------------------------------------------------------------------//
// Riemann zeta at integers (only what the polylog expansion needs)
//---------------------------------------------------------------------------//

namespace detail {

// B_2, B_4, ..., B_20
inline constexpr std::array<double, 10> bernoulli_even = {
    1.0 / 6,          -1.0 / 30,   1.0 / 42,         -1.0 / 30,      5.0 / 66,
    -691.0 / 2730.0, 7.0 / 6,    -3617.0 / 510.0, 43867.0 / 798.0, -174611.0 / 330.0};

// zeta(n) for n >= 2 by Euler-Maclaurin with ten leading terms summed.
inline double zeta_positive(int n)
{
    if (n >= 60)
        return 1 + std::pow(2.0, -n) + std::pow(3.0, -n);
    const int N = 10;
    double s = 0;
    for (int k = N - 1; k >= 1; --k)
        s += std::pow(double(k), -n);
    double Nn = std::pow(double(N), -n);
    s += N * Nn / (n - 1) + 0.5 * Nn;
    // B_{2j}/(2j)! * n(n+1)...(n+2j-2) * N^{-n-2j+1}
    double rising = n, fact = 2, pw = Nn / N;
    for (int j = 1; j <= 10; ++j) {
        s += bernoulli_even[j - 1] / fact * rising * pw;
        rising *= double(n + 2 * j - 1) * (n + 2 * j);
        fact *= double(2 * j + 1) * (2 * j + 2);
        pw /= double(N) * N;
    }
    return s;
}

// zeta at any integer except 1.
inline double zeta_int(int n)
{
    if (n >= 2)
        return zeta_positive(n);
    if (n == 0)
        return -0.5;
    if (n == 1)
        throw DomainError("zeta pole at 1");
    if (n % 2 == 0)
        return 0.0;
    // zeta(1-2j) = (-1)^j 2 (2j-1)! zeta(2j) / (2 pi)^{2j}
    int j = (1 - n) / 2;
    double v = 2 * std::exp(std::lgamma(2.0 * j) - 2.0 * j * std::log(two_pi)) * zeta_positive(2 * j);
    return j % 2 ? -v : v;
}

inline cplx log1p_series(cplx x)
{
    cplx sum = 0, pw = x;
    for (int k = 1; k < 200; ++k) {
        cplx t = pw / double(k);
        sum += (k % 2 ? t : -t);
        if (std::abs(t) < 1e-17 * std::abs(sum))
            break;
        pw *= x;
    }
    return sum;
}

inline cplx log1p_c(cplx x)
{
    return std::abs(x) < 0.3 ? log1p_series(x) : std::log(1.0 + x);
}

} // namespace detail

//---------------------------------------------------------------------------//
// Polylogarithm Li_s(z) = sum z^k / k^s for integer s >= -2
//---------------------------------------------------------------------------//

inline cplx polylog(int order, cplx z)
{
    if (order < -2)
        throw DomainError("polylog order must be >= -2");
    double az = std::abs(z);
    if (order <= 1 && az > 1 - 1e-9)
        throw DomainError("polylog of order <= 1 needs |z| <= 1 - 1e-9, got |z| = " + std::to_string(az));
    if (az > 1 + 1e-15)
        throw DomainError("polylog argument outside the closed unit disk");
    if (az == 0)
        return 0;

    if (az <= 0.5) {
        cplx sum = 0, pw = z;
        for (int k = 1; k < 400; ++k) {
            cplx t = pw * std::pow(double(k), -order);
            sum += t;
            if (k > 8 && std::abs(t) < 1e-17 * std::abs(sum))
                break;
            pw *= z;
        }
        return sum;
    }
    switch (order) {
    case 1: return -std::log(1.0 - z);
    case 0: return z / (1.0 - z);
    case -1: return z / ((1.0 - z) * (1.0 - z));
    case -2: return z * (1.0 + z) / ((1.0 - z) * (1.0 - z) * (1.0 - z));
    default: break;
    }
    if (z == cplx(1, 0))
        return detail::zeta_positive(order);

    // Expansion in mu = log z, valid for |mu| < 2 pi:
    // Li_s(e^mu) = mu^{s-1}/(s-1)! (H_{s-1} - log(-mu)) + sum_{k != s-1} zeta(s-k) mu^k / k!
    cplx mu = std::log(z);
    double harmonic = 0;
    for (int j = 1; j < order; ++j)
        harmonic += 1.0 / j;
    cplx sum = 0, pw = 1; // pw = mu^k / k!
    for (int k = 0; k < 200; ++k) {
        if (k > 0)
            pw *= mu / double(k);
        cplx t;
        if (k == order - 1)
            t = pw * (harmonic - std::log(-mu));
        else
            t = detail::zeta_int(order - k) * pw;
        sum += t;
        // |zeta(s-k)/k!| <= 4 (2 pi)^{-k} once s-k < 0
        if (k > order + 2 && 4 * std::pow(std::abs(mu) / two_pi, k) < 1e-17 * std::abs(sum))
            break;
    }
    return sum;
}

// Local factor log of the Euler factor, Li_{m+1}(p^{-sigma} w) / (log p)^m.
inline cplx eta_local(double sigma, int m, std::uint64_t p, cplx w)
{
    if (p < 2 || sigma <= 0 || m < 0)
        throw ParameterError("eta_local needs p >= 2, sigma > 0, m >= 0");
    double lp = std::log(double(p));
    return polylog(m + 1, std::pow(double(p), -sigma) * w) / std::pow(lp, m);
}

//---------------------------------------------------------------------------//
// Modified Bessel I0 and g = log I0
//---------------------------------------------------------------------------//

namespace detail {

inline cplx i0_series(cplx z)
{
    cplx q = 0.25 * z * z, t = 1, sum = 1;
    for (int k = 1; k < 500; ++k) {
        t *= q / (double(k) * k);
        sum += t;
        if (std::abs(t) < 1e-17 * std::abs(sum))
            break;
    }
    return sum;
}

// I0(z) - 1
inline cplx i0_series_minus_one(cplx z)
{
    cplx q = 0.25 * z * z, t = 1, sum = 0;
    for (int k = 1; k < 500; ++k) {
        t *= q / (double(k) * k);
        sum += t;
        if (std::abs(t) < 1e-17 * std::abs(sum))
            break;
    }
    return sum;
}

// sum_k a_k(nu) / z^k of I_nu(z) ~ e^z/sqrt(2 pi z) * sum, truncated at the
// smallest term.
inline cplx i_asymptotic_sum(int nu, cplx z)
{
    double mu = 4.0 * nu * nu;
    cplx t = 1, sum = 1;
    double last = 1;
    for (int k = 1; k < 200; ++k) {
        double odd = 2.0 * k - 1;
        t *= -(mu - odd * odd) / (8.0 * k) / z;
        double at = std::abs(t);
        if (at > last)
            break;
        sum += t;
        last = at;
        if (at < 1e-17 * std::abs(sum))
            break;
    }
    return sum;
}

// e^{-z} I0(z) as the mean of exp(z (cos theta - 1)) over a doubled
// periodic trapezoid rule.
inline cplx i0_scaled_trapezoid(cplx z)
{
    auto mean = [&](int n, int stride, int offset) {
        cplx s = 0;
        for (int j = offset; j < n; j += stride)
            s += std::exp(z * (std::cos(two_pi * j / n) - 1.0));
        return s;
    };
    int n = 64;
    cplx sum = mean(n, 1, 0);
    cplx prev = sum / double(n);
    for (int it = 0; it < 20; ++it) {
        sum += mean(2 * n, 2, 1);
        n *= 2;
        cplx cur = sum / double(n);
        if (std::abs(cur - prev) <= 1e-15 * std::abs(cur))
            return cur;
        prev = cur;
    }
    throw NumericError("I0 trapezoid rule did not converge", "|z|=" + std::to_string(std::abs(z)));
}

inline bool in_sector(cplx z) { return z.real() >= 0 && std::abs(z.imag()) <= z.real() * (1 + 1e-12); }

} // namespace detail

// e^{-z} I0(z) for Re z >= 0.
inline cplx bessel_i0_scaled(cplx z)
{
    if (z.real() < 0)
        throw DomainError("bessel_i0 needs Re z >= 0");
    double az = std::abs(z);
    if (az <= 30 && az - z.real() <= 10)
        return std::exp(-z) * detail::i0_series(z);
    if (az > 30 && detail::in_sector(z))
        return detail::i_asymptotic_sum(0, z) / std::sqrt(two_pi * z);
    return detail::i0_scaled_trapezoid(z);
}

inline cplx bessel_i0(cplx z)
{
    if (z.real() < 0)
        throw DomainError("bessel_i0 needs Re z >= 0");
    double az = std::abs(z);
    if (az <= 30 && az - z.real() <= 10)
        return detail::i0_series(z);
    return std::exp(z) * bessel_i0_scaled(z);
}

// log I0 on the sector |Im z| <= Re z, on the branch that is real on the
// positive axis and continuous across the sector.
inline cplx log_i0(cplx z)
{
    if (!detail::in_sector(z))
        throw DomainError("log_i0 needs |Im z| <= Re z");
    double az = std::abs(z);
    if (az <= 1)
        return detail::log1p_c(detail::i0_series_minus_one(z));
    if (az > 30)
        return z - 0.5 * std::log(two_pi * z) + std::log(detail::i_asymptotic_sum(0, z));
    return z + std::log(bessel_i0_scaled(z));
}

// Real-argument quantities around g = log I0 needed by the cumulant and the
// g_n integrals: g, rho = I1/I0 = g', rho' = g'', rho'', and the ratio
// h2 = I2/I0 with two derivatives.
struct BesselRatios {
    double log_i0 = 0;
    double rho = 0, drho = 0, d2rho = 0;
    double h2 = 0, dh2 = 0, d2h2 = 0;
};

inline BesselRatios bessel_ratios(double x)
{
    if (x < 0)
        throw DomainError("bessel_ratios needs x >= 0");
    BesselRatios b;
    if (x == 0) {
        b.drho = 0.5;
        b.d2h2 = 0.25;
        return b;
    }
    if (x < 1e-8) {
        // leading series terms; the power series below underflows in x^2
        b.log_i0 = x * x / 4;
        b.rho = x / 2;
        b.drho = 0.5;
        b.d2rho = -3 * x / 8;
        b.h2 = x * x / 8;
        b.dh2 = x / 4;
        b.d2h2 = 0.25;
        return b;
    }
    if (x <= 30) {
        // I_nu and two derivatives for nu = 0,1,2 from the power series
        double v[3][3] = {};
        double q = 0.5 * x;
        for (int nu = 0; nu <= 2; ++nu) {
            // a_k = (x/2)^{2k+nu} / (k! (k+nu)!)
            double a = 1;
            for (int j = 1; j <= nu; ++j)
                a *= q / j;
            for (int k = 0; k < 300; ++k) {
                int n = 2 * k + nu;
                v[nu][0] += a;
                v[nu][1] += n * a / x;
                v[nu][2] += n * (n - 1.0) * a / (x * x);
                a *= q * q / ((k + 1.0) * (k + 1.0 + nu));
                if (a < 1e-18 * v[nu][0])
                    break;
            }
        }
        auto quotient = [&](int top, double& f, double& df, double& d2f) {
            double u = v[top][0], du = v[top][1], d2u = v[top][2];
            double w = v[0][0], dw = v[0][1], d2w = v[0][2];
            f = u / w;
            df = (du * w - u * dw) / (w * w);
            d2f = (d2u * w - u * d2w) / (w * w) - 2 * dw * (du * w - u * dw) / (w * w * w);
        };
        quotient(1, b.rho, b.drho, b.d2rho);
        quotient(2, b.h2, b.dh2, b.d2h2);
        b.log_i0 = x <= 1 ? std::log1p(detail::i0_series_minus_one(x).real()) : std::log(v[0][0]);
        return b;
    }
    double s0 = detail::i_asymptotic_sum(0, x).real();
    double s1 = detail::i_asymptotic_sum(1, x).real();
    b.log_i0 = x - 0.5 * std::log(two_pi * x) + std::log(s0);
    b.rho = s1 / s0;
    b.drho = 1 - b.rho / x - b.rho * b.rho;
    b.d2rho = -b.drho / x + b.rho / (x * x) - 2 * b.rho * b.drho;
    b.h2 = 1 - 2 * b.rho / x;
    b.dh2 = 2 * (b.rho / x - b.drho) / x;
    b.d2h2 = -2 * (b.d2rho / x - 2 * b.drho / (x * x) + 2 * b.rho / (x * x * x));
    return b;
}

//---------------------------------------------------------------------------//
// lambda_r(theta; m, alpha) = sum_k r^k / k^{m+1} cos(k theta - alpha)
//---------------------------------------------------------------------------//

// deriv-th theta derivative; cos(x + n pi/2) is taken exactly from the
// quarter-turn table so that symmetric points give exact zeros.
inline double lambda(double r, double theta, int m, double alpha, int deriv = 0)
{
    if (!(r > 0) || r > std::sqrt(0.5) * (1 + 1e-14))
        throw DomainError("lambda needs 0 < r <= 1/sqrt(2)");
    if (m < -2 || deriv < 0)
        throw DomainError("lambda needs m >= -2 and deriv >= 0");
    int e = deriv - m - 1; // term r^k k^e trig(k theta - alpha)
    double sum = 0, rk = 1;
    for (int k = 1; k < 2000; ++k) {
        rk *= r;
        double mag = rk * std::pow(double(k), e);
        double x = k * theta - alpha, t;
        switch (deriv % 4) {
        case 0: t = std::cos(x); break;
        case 1: t = -std::sin(x); break;
        case 2: t = -std::cos(x); break;
        default: t = std::sin(x); break;
        }
        sum += mag * t;
        // geometric tail bound once the term ratio drops below one
        double ratio = r * std::pow((k + 1.0) / k, e);
        if (ratio < 1 && mag * ratio / (1 - ratio) < 1e-17)
            break;
    }
    return sum;
}

struct LambdaZeros {
    double theta1 = 0;            // maximizer, in [0, 2 pi)
    double theta2 = 0;            // minimizer, in (theta1, theta1 + 2 pi)
    double lambda_at_theta1 = 0;
    double lambda_dd_at_theta1 = 0;
};

// Both critical points of theta -> lambda_r(theta; m, alpha) in one period.
inline LambdaZeros lambda_zeros(double r, int m, double alpha)
{
    if (!(r > 0) || r > std::sqrt(0.5) * (1 + 1e-14))
        throw DomainError("lambda_zeros needs 0 < r <= 1/sqrt(2)");
    if (m < 0)
        throw DomainError("lambda_zeros needs m >= 0");
    auto d1 = [&](double th) { return lambda(r, th, m, alpha, 1); };

    for (int n = 720; n <= 720 * 16; n *= 2) {
        std::vector<double> f(n + 1);
        for (int j = 0; j <= n; ++j)
            f[j] = j < n ? d1(two_pi * j / n) : f[0];
        std::vector<double> roots;
        for (int j = 0; j < n; ++j) {
            double a = two_pi * j / n, b = two_pi * (j + 1) / n;
            if (f[j] == 0) {
                roots.push_back(a);
                continue;
            }
            if (f[j + 1] == 0 || (f[j] > 0) == (f[j + 1] > 0))
                continue;
            double fa = f[j];
            for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
                double c = 0.5 * (a + b), fc = d1(c);
                if (fc == 0) {
                    a = b = c;
                    break;
                }
                if ((fc > 0) == (fa > 0))
                    a = c, fa = fc;
                else
                    b = c;
            }
            roots.push_back(0.5 * (a + b));
        }
        if (roots.size() != 2)
            continue;
        double v0 = lambda(r, roots[0], m, alpha), v1 = lambda(r, roots[1], m, alpha);
        LambdaZeros z;
        z.theta1 = v0 >= v1 ? roots[0] : roots[1];
        z.theta2 = v0 >= v1 ? roots[1] : roots[0];
        if (z.theta1 >= two_pi)
            z.theta1 -= two_pi;
        if (z.theta2 <= z.theta1)
            z.theta2 += two_pi;
        z.lambda_at_theta1 = std::max(v0, v1);
        z.lambda_dd_at_theta1 = lambda(r, z.theta1, m, alpha, 2);
        return z;
    }
    throw InternalError("lambda' does not have exactly two zeros per period (r=" + std::to_string(r) +
                        ", m=" + std::to_string(m) + ", alpha=" + std::to_string(alpha) + ")");
}

//---------------------------------------------------------------------------//
// Smoothing kernels for interval indicators
//---------------------------------------------------------------------------//

// G(u) = 2u/pi + 2(1-u) u / tan(pi u) on [0,1]; G(0) = 2/pi, G(1) = 0.
inline double bs_G(double u)
{
    if (u < 0 || u > 1)
        throw DomainError("bs_G needs u in [0, 1]");
    if (u < 1e-4) {
        double a = pi * u;
        return 2 * u / pi + 2 * (1 - u) / pi * (1 - a * a / 3 - a * a * a * a / 45);
    }
    if (u > 1 - 1e-4) {
        double e = 1 - u, a = pi * e;
        return 2 * u / pi - 2 * (1 - e) / pi * (1 - a * a / 3 - a * a * a * a / 45);
    }
    return 2 * u / pi + 2 * (1 - u) * u / std::tan(pi * u);
}

// Fejer kernel (sin(pi x)/(pi x))^2.
inline double bs_K(double x)
{
    double a = pi * x;
    if (std::abs(a) < 1e-4)
        return 1 - a * a / 3;
    double s = std::sin(a) / a;
    return s * s;
}

// (e^{-2 pi i u c} - e^{-2 pi i u d}) / 2
inline cplx bs_f(double u, double c, double d)
{
    return 0.5 * (std::polar(1.0, -two_pi * u * c) - std::polar(1.0, -two_pi * u * d));
}

struct BSParams {
    double L = 1;
    double c = 0;
    double d = 1;
};

inline void validate(const BSParams& bs)
{
    if (!(bs.L > 0) || !std::isfinite(bs.L) || !(bs.c < bs.d))
        throw ParameterError("smoothing needs finite L > 0 and c < d");
}

namespace detail {

// int_0^1 G(v) sin(2 pi L a v) / v dv, written via sinc so v = 0 is regular.
inline double smoothed_sign_integrand(double v, double L, double a)
{
    double w = two_pi * L * a;
    double x = w * v;
    double sinc = std::abs(x) < 1e-8 ? 1 - x * x / 6 : std::sin(x) / x;
    return bs_G(v) * w * sinc;
}

} // namespace detail

// Band-limited approximation of the indicator of (c, d):
// Im int_0^L G(u/L) e^{2 pi i u x} f_{c,d}(u) du/u.
inline double smoothed_indicator(double x, const BSParams& bs)
{
    validate(bs);
    double a = x - bs.c, b = x - bs.d;
    double cycles = bs.L * std::max({std::abs(a), std::abs(b), 1.0});
    int panels = static_cast<int>(std::ceil(2 * cycles));
    double total = 0;
    auto f = [&](double v) {
        return 0.5 * (detail::smoothed_sign_integrand(v, bs.L, a) - detail::smoothed_sign_integrand(v, bs.L, b));
    };
    for (int i = 0; i < panels; ++i) {
        double lo = double(i) / panels, hi = double(i + 1) / panels;
        total += integrate(f, lo, hi, 1e-15 / panels * std::max(1.0, cycles)).value;
    }
    return total;
}

} // namespace etadist
