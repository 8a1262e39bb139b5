#pragma once

// Moment-generating function of Re(e^{-i alpha} eta) and the large-deviation
// pipeline built on it: per-prime MGFs, the cumulant-generating function
// f(kappa) = log E exp(kappa Re e^{-i alpha} eta) with two derivatives, the
// saddle point f'(kappa) = tau, the tail main term and the tilted density.

#include "charfun.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace etadist {

namespace detail {

// Y(theta_j) = Re(e^{-i alpha} sum_k c_k e^{i k theta_j}) on n equispaced nodes.
inline void projection_nodes(const double* c, std::size_t count, double alpha, std::size_t n, double* y)
{
    const cplx rot = std::polar(1.0, -alpha);
    for (std::size_t j = 0; j < n; ++j) {
        cplx z = std::polar(1.0, two_pi * double(j) / double(n));
        cplx acc = 0;
        for (std::size_t k = count; k-- > 0;)
            acc = (acc + c[k]) * z;
        y[j] = (rot * acc).real();
    }
}

// Trapezoid node count resolving the peak of exp(kappa Y): the peak has
// curvature at most kappa sum k^2 c_k, so the aliasing error is about
// exp(-N^2 / (2 kappa sum k^2 c_k)) <= e^{-32}.
inline std::size_t mgf_nodes(double abs_s, double sum_k2c)
{
    return std::max<std::size_t>(64, 8 * std::size_t(std::ceil(std::sqrt(abs_s * sum_k2c))));
}

struct Tilted {
    double log_f = 0, mean = 0, var = 0;
};

// log of the node average of e^{kappa y}, and the tilted mean and variance.
inline Tilted tilted_moments(const double* y, std::size_t n, double kappa)
{
    double top = -INFINITY;
    for (std::size_t j = 0; j < n; ++j)
        top = std::max(top, kappa * y[j]);
    double s0 = 0, s1 = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double w = std::exp(kappa * y[j] - top);
        s0 += w;
        s1 += w * y[j];
    }
    Tilted t;
    t.mean = s1 / s0;
    double s2 = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double d = y[j] - t.mean;
        s2 += std::exp(kappa * y[j] - top) * d * d;
    }
    t.var = s2 / s0;
    t.log_f = top + std::log(s0 / double(n));
    return t;
}

} // namespace detail

// log F_p(s) with F_p(s) = (1/2 pi) int exp(s Re e^{-i alpha} eta_p(e^{i theta})) d theta,
// by the periodic trapezoid rule in log scale.
inline cplx log_mgf_local(const ModelPoint& mp, std::uint64_t p, cplx s)
{
    if (p < 2 || mp.sigma <= 0 || mp.m < 0)
        throw ParameterError("mgf_local needs p >= 2, sigma > 0, m >= 0");
    auto c = detail::local_coefficients(p, mp.sigma, mp.m);
    double k2c = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
        k2c += double(k + 1) * double(k + 1) * c[k];
    std::size_t n = detail::mgf_nodes(std::abs(s), k2c);
    std::vector<double> y(n);
    detail::projection_nodes(c.data(), c.size(), mp.alpha, n, y.data());
    double top = -INFINITY;
    for (double v : y)
        top = std::max(top, s.real() * v);
    cplx sum = 0;
    for (double v : y)
        sum += std::exp(s * v - top);
    return top + std::log(sum / double(n));
}

inline cplx mgf_local(const ModelPoint& mp, std::uint64_t p, cplx s) { return std::exp(log_mgf_local(mp, p, s)); }

// Saddle-point value of log F_p(s) for Re s = kappa large:
// s lambda(theta_1)/(log p)^m + (1/2) log((log p)^m / (2 pi s |lambda''(theta_1)|)).
// Valid when p^sigma (log p)^m <= kappa (log kappa)^{-3}; check_precondition
// = false evaluates it regardless.
inline cplx log_mgf_local_saddle(const ModelPoint& mp, std::uint64_t p, cplx s, bool check_precondition = true)
{
    validate(mp);
    double kappa = s.real();
    if (!(kappa > 0) || std::abs(s.imag()) > kappa)
        throw DomainError("saddle evaluation needs Re s > 0 and |Im s| <= Re s");
    double lp = std::log(double(p)), lpm = std::pow(lp, mp.m);
    if (check_precondition) {
        double lk = std::log(kappa);
        if (!(lk > 0) || std::pow(double(p), mp.sigma) * lpm > kappa / (lk * lk * lk))
            throw DomainError("saddle precondition p^sigma (log p)^m <= kappa (log kappa)^-3 fails for p = " +
                              std::to_string(p) + ", kappa = " + std::to_string(kappa));
    }
    auto z = lambda_zeros(std::pow(double(p), -mp.sigma), mp.m, mp.alpha);
    return s * z.lambda_at_theta1 / lpm + 0.5 * std::log(lpm / (two_pi * s * std::abs(z.lambda_dd_at_theta1)));
}

inline cplx mgf_local_saddle(const ModelPoint& mp, std::uint64_t p, cplx s, bool check_precondition = true)
{
    return std::exp(log_mgf_local_saddle(mp, p, s, check_precondition));
}

//---------------------------------------------------------------------------//
// Cumulant-generating function
//---------------------------------------------------------------------------//

struct CumulantOptions {
    double tol = 1e-10;             // relative target for f
    std::int64_t always_exact_below = 100; // primes below this are always integrated
    bool saddle_fast_path = false;  // per-prime saddle formula where its precondition holds with factor 1/2
};

struct CumulantValue {
    double kappa = 0;
    double f = 0, f1 = 0, f2 = 0;
    double error_estimate = 0;    // bound on the Bessel-region approximation plus the beyond-table term
    double beyond_table = 0;      // contribution of primes beyond the table to f
    std::size_t quadrature_primes = 0;
    std::size_t saddle_primes = 0;
    double cutoff_y = 0;          // table cutoff
};

namespace detail {

// Per-prime approximation for p with kappa c_1 not too large relative to the
// rest of the series: with z = kappa c_1,
//   log F_p ~ g(z) + kappa c_2 cos(alpha) h2(z) + kappa^2 (S2_p - c_1^2)/4,
// g = log I0, h2 = I2/I0, and its kappa-derivatives.
struct BesselTerm {
    double f = 0, f1 = 0, f2 = 0, f3 = 0, err = 0;
};

inline BesselTerm bessel_term(double kappa, double c1, double c2, double s2, double c3_sum, double cos_alpha)
{
    BesselTerm t;
    double z = kappa * c1;
    auto b = bessel_ratios(z);
    double rest = std::max(0.0, s2 - c1 * c1);
    t.f = b.log_i0 + kappa * c2 * cos_alpha * b.h2 + kappa * kappa * rest / 4;
    t.f1 = c1 * b.rho + c2 * cos_alpha * (b.h2 + z * b.dh2) + kappa * rest / 2;
    t.f2 = c1 * c1 * b.drho + c2 * cos_alpha * c1 * (2 * b.dh2 + z * b.d2h2) + rest / 2;
    t.f3 = c1 * c1 * c1 * b.d2rho;
    t.err = kappa * c3_sum * std::min(1.0, z * z * z / 48) + kappa * kappa * c2 * c2 * std::min(1.0, z) / 4;
    return t;
}

inline std::size_t first_index_above(const ModelContext& ctx, std::int64_t bound)
{
    std::size_t i = 0;
    while (i < ctx.size() && std::int64_t(ctx.prime(i)) < bound)
        ++i;
    return i;
}

struct CumulantWork {
    std::vector<BesselTerm> bessel;
    std::vector<double> err_suffix;
    std::size_t quad_end = 0;
    double tol_abs = 0;
    BesselTerm beyond;
    double beyond_err = 0;
};

inline CumulantWork cumulant_plan(const ModelContext& ctx, double kappa, double alpha, const CumulantOptions& opt)
{
    CumulantWork w;
    const std::size_t n = ctx.size();
    const double ca = std::cos(alpha);
    w.bessel.resize(n);
    parallel_blocks(
        n,
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                double c1 = ctx.c1(i), c2 = ctx.c2(i);
                w.bessel[i] = bessel_term(kappa, c1, c2, ctx.second_moment(i), ctx.sum_c(i) - c1 - c2, ca);
            }
        },
        4096);
    // beyond the table, integrate against the smooth prime density
    auto at = [&](double y) {
        double c1 = ctx.c1_at(y), c2 = ctx.c2_at(y);
        double c3 = std::pow(y, -3 * ctx.sigma()) / (3 * std::pow(3 * std::log(y), ctx.m()));
        return bessel_term(kappa, c1, c2, ctx.second_moment_at(y), c3 / (1 - std::pow(y, -ctx.sigma())), ca);
    };
    w.beyond.f = ctx.integral_beyond([&](double y) { return at(y).f; });
    w.beyond.f1 = ctx.integral_beyond([&](double y) { return at(y).f1; });
    w.beyond.f2 = ctx.integral_beyond([&](double y) { return at(y).f2; });
    w.beyond.f3 = ctx.integral_beyond([&](double y) { return at(y).f3; });
    double err_int = ctx.integral_beyond([&](double y) { return at(y).err; });
    w.beyond_err = err_int + std::abs(ctx.prime_count_discrepancy()) * std::abs(at(ctx.cutoff()).f);

    double f_est = w.beyond.f;
    for (const auto& t : w.bessel)
        f_est += t.f;
    w.tol_abs = opt.tol * std::max(1.0, std::abs(f_est));
    w.err_suffix.assign(n + 1, 0);
    for (std::size_t i = n; i-- > 0;)
        w.err_suffix[i] = w.err_suffix[i + 1] + w.bessel[i].err;
    std::size_t q = n;
    while (q > 0 && w.err_suffix[q - 1] <= w.tol_abs / 2)
        --q;
    w.quad_end = std::max(q, first_index_above(ctx, opt.always_exact_below));
    return w;
}

} // namespace detail

// f, f' and f'' at kappa > 0. Small primes are integrated by quadrature
// (tilted mean and variance exactly); the rest use the Bessel approximation
// with a per-prime error bound, and the primes beyond the table enter by an
// integral against li(y) - li(sqrt y)/2. The quadrature range grows until
// the summed bound of the approximated primes is below tol * max(1, |f|) / 2.
inline CumulantValue cumulant(const ModelPoint& mp, double kappa, const CumulantOptions& opt = {},
                              std::shared_ptr<const ModelContext> ctx = nullptr)
{
    validate(mp);
    if (!(kappa > 0) || !std::isfinite(kappa))
        throw ParameterError("cumulant needs a finite kappa > 0");
    if (!ctx)
        ctx = shared_context(mp.sigma, mp.m);
    auto w = detail::cumulant_plan(*ctx, kappa, mp.alpha, opt);
    if (w.quad_end >= ctx->size())
        throw CapacityError("cumulant quadrature range exceeds the prime table at kappa = " + std::to_string(kappa));

    const std::size_t nq = w.quad_end;
    std::vector<detail::Tilted> quad(nq);
    std::vector<char> by_saddle(nq, 0);
    const double lk = std::log(kappa);
    parallel_blocks(nq, [&](std::size_t b, std::size_t e) {
        std::vector<double> y;
        for (std::size_t i = b; i < e; ++i) {
            double p = ctx->prime(i), lpm = std::pow(std::log(p), mp.m);
            if (opt.saddle_fast_path && lk > 0 && std::pow(p, mp.sigma) * lpm <= 0.5 * kappa / (lk * lk * lk)) {
                auto z = lambda_zeros(std::pow(p, -mp.sigma), mp.m, mp.alpha);
                quad[i].log_f = kappa * z.lambda_at_theta1 / lpm +
                                0.5 * std::log(lpm / (two_pi * kappa * std::abs(z.lambda_dd_at_theta1)));
                quad[i].mean = z.lambda_at_theta1 / lpm - 0.5 / kappa;
                quad[i].var = 0.5 / (kappa * kappa);
                by_saddle[i] = 1;
                continue;
            }
            std::size_t n = detail::mgf_nodes(kappa, ctx->sum_k2c(i));
            y.resize(n);
            detail::projection_nodes(ctx->coef(i), ctx->coef_count(i), mp.alpha, n, y.data());
            quad[i] = detail::tilted_moments(y.data(), n, kappa);
        }
    });

    CumulantValue out;
    out.kappa = kappa;
    out.cutoff_y = ctx->cutoff();
    out.quadrature_primes = nq;
    for (std::size_t i = 0; i < nq; ++i) {
        out.f += quad[i].log_f;
        out.f1 += quad[i].mean;
        out.f2 += quad[i].var;
        out.saddle_primes += by_saddle[i];
    }
    for (std::size_t i = nq; i < ctx->size(); ++i) {
        out.f += w.bessel[i].f;
        out.f1 += w.bessel[i].f1;
        out.f2 += w.bessel[i].f2;
    }
    out.f += w.beyond.f;
    out.f1 += w.beyond.f1;
    out.f2 += w.beyond.f2;
    out.beyond_table = w.beyond.f;
    out.error_estimate = w.err_suffix[nq] + w.beyond_err;
    return out;
}

//---------------------------------------------------------------------------//
// g_n(sigma) and the explicit constants
//---------------------------------------------------------------------------//

struct GnTable {
    double sigma = 0;
    std::vector<double> values; // g_n = G_n(sigma) g_0, n = 0..n_max
    double g0_alias_G = 0;      // G(sigma) = int_0^inf log I0(u) u^{-1-1/sigma} du
    double g1_direct = 0;       // int_0^inf g'(u) u^{-1/sigma} du, computed independently
};

// G_n(sigma) = prod_{j<n} (1/sigma - j)
inline double gn_factor(double sigma, int n)
{
    double v = 1;
    for (int j = 0; j < n; ++j)
        v *= 1 / sigma - j;
    return v;
}

// g_0 and g_1 by split quadrature: on [0, 30] the substitution u = t^k,
// k = sigma/(2 sigma - 1), removes the u^{1 - 1/sigma} endpoint behaviour;
// on [30, inf) the leading asymptotic terms of g (or g') are integrated in
// closed form and the decaying remainder through u = 30/t.
inline GnTable gn_quadrature(double sigma, int n_max = 4)
{
    if (!(sigma > 0.5 && sigma < 1))
        throw DomainError("g_n(sigma) needs 1/2 < sigma < 1");
    if (n_max < 1)
        throw ParameterError("n_max must be >= 1");
    const double a = 1 / sigma, k = sigma / (2 * sigma - 1), U = 30, t_top = std::pow(U, 1 / k);
    const double abs_tol = 1e-15, rel_tol = 1e-13;

    auto head0 = [&](double t) {
        if (t <= 0)
            return k / 4;
        double u = std::pow(t, k);
        return k * log_i0(u).real() * std::pow(t, -1 - k * a);
    };
    auto head1 = [&](double t) {
        if (t <= 0)
            return k / 2;
        double u = std::pow(t, k);
        return k * bessel_ratios(u).rho * std::pow(t, k - 1 - k * a);
    };
    // remainders beyond U, as functions of t = U/u in (0, 1]
    auto tail0 = [&](double t) {
        if (t <= 0)
            return 0.0;
        double u = U / t;
        double r = std::log(bessel_i0_scaled(u).real()) + 0.5 * std::log(two_pi * u);
        return r * std::pow(t, a - 1);
    };
    auto tail1 = [&](double t) {
        if (t <= 0)
            return 0.0;
        double u = U / t;
        double q = bessel_ratios(u).rho - 1 + 0.5 / u;
        return q * std::pow(t, a - 2);
    };

    double lu = std::log(U), ua = std::pow(U, -a);
    double g0 = integrate(head0, 0, t_top, abs_tol, rel_tol).value;
    g0 += std::pow(U, 1 - a) / (a - 1) - 0.5 * std::log(two_pi) * ua / a - 0.5 * ua * (a * lu + 1) / (a * a);
    g0 += ua * integrate(tail0, 0, 1, abs_tol, rel_tol).value;

    double g1 = integrate(head1, 0, t_top, abs_tol, rel_tol).value;
    g1 += std::pow(U, 1 - a) / (a - 1) - 0.5 * ua / a;
    g1 += std::pow(U, 1 - a) * integrate(tail1, 0, 1, abs_tol, rel_tol).value;

    GnTable t;
    t.sigma = sigma;
    t.g0_alias_G = g0;
    t.g1_direct = g1;
    for (int n = 0; n <= n_max; ++n)
        t.values.push_back(gn_factor(sigma, n) * g0);
    return t;
}

inline const GnTable& cached_gn(double sigma)
{
    static std::mutex lock;
    static std::map<double, std::unique_ptr<GnTable>> cache;
    std::lock_guard<std::mutex> g(lock);
    auto& slot = cache[sigma];
    if (!slot)
        slot = std::make_unique<GnTable>(gn_quadrature(sigma, 8));
    return *slot;
}

struct ModelConstants {
    double sigma = 0;
    int m = 0;
    double g0 = 0, g1 = 0;
    double A = 0;   // from G(sigma) = g0
    double A_m = 0; // from g1
    double C_m = 0; // saddle scale kappa ~ C_m tau^{sigma/(1-sigma)} (log tau)^{(m+sigma)/(1-sigma)}
};

inline ModelConstants model_constants(double sigma, int m)
{
    if (m < 0)
        throw ParameterError("m must be >= 0");
    const auto& gn = cached_gn(sigma);
    ModelConstants c;
    c.sigma = sigma;
    c.m = m;
    c.g0 = gn.g0_alias_G;
    c.g1 = gn.g1_direct;
    double e = 1 / (1 - sigma);
    c.A = std::pow(std::pow(sigma, 2 * sigma) / (std::pow(1 - sigma, 2 * sigma - 1) * std::pow(c.g0, sigma)), e);
    c.A_m = std::pow(sigma / (std::pow(1 - sigma, (m - 1) / sigma + 2) * c.g1), sigma * e);
    c.C_m = std::pow(sigma / (std::pow(1 - sigma, m / sigma + 1) * c.g1), sigma * e);
    return c;
}

// Main term sigma^{m/sigma} g_n kappa^{1/sigma - n} / (log kappa)^{m/sigma + 1}
// of the n-th derivative of f.
inline double cumulant_asymptotic(const ModelPoint& mp, int n, double kappa, double kappa_floor = 1e3)
{
    validate(mp);
    if (n < 0)
        throw ParameterError("derivative order must be >= 0");
    if (!(kappa >= kappa_floor))
        throw DomainError("kappa = " + std::to_string(kappa) + " is below the asymptotic floor " +
                          std::to_string(kappa_floor));
    const auto& gn = cached_gn(mp.sigma);
    double g = gn_factor(mp.sigma, n) * gn.g0_alias_G;
    double q = mp.m / mp.sigma;
    return std::pow(mp.sigma, q) * g * std::pow(kappa, 1 / mp.sigma - n) / std::pow(std::log(kappa), q + 1);
}

//---------------------------------------------------------------------------//
// Saddle point and tails
//---------------------------------------------------------------------------//

struct SaddleResult {
    ModelPoint mp;
    double tau = 0, kappa = 0;
    double f = 0, f1 = 0, f2 = 0;
    double tail_main = 0;
    double log10_tail_main = 0; // stays finite after tail_main underflows
    double error_scale = 0;
    double tail_asymptotic = 0; // 0 when the closed form does not apply
    double log10_tail_asymptotic = 0;
    double cutoff_y = 0;
    double beyond_table = 0;
    double cumulant_error = 0;
    int iterations = 0;
};

struct SaddleOptions {
    double tol = 1e-10;       // relative tolerance on f'(kappa) = tau
    double min_kappa = 10;    // tail_saddle refuses smaller saddle points
    CumulantOptions cumulant;
};

// Solves f'(kappa) = tau by a bracket around the asymptotic inverse
// kappa_0 = C_m tau^{sigma/(1-sigma)} (log tau)^{(m+sigma)/(1-sigma)} (or
// tau / f''(0) for small tau), then safeguarded Newton steps.
inline SaddleResult solve_saddle(const ModelPoint& mp, double tau, const SaddleOptions& opt = {})
{
    validate(mp);
    if (!(tau > 0) || !std::isfinite(tau))
        throw ParameterError("tau must be positive and finite");
    auto ctx = shared_context(mp.sigma, mp.m);
    auto eval = [&](double k) { return cumulant(mp, k, opt.cumulant, ctx); };

    // variance at kappa = 0 is half the total second moment
    double var0 = 0.5 * ctx->suffix_second_moment(0);
    double kappa0 = tau / var0;
    if (mp.sigma > 0.5 && mp.sigma < 1 && tau > std::exp(1.0)) {
        auto c = model_constants(mp.sigma, mp.m);
        double e = 1 / (1 - mp.sigma);
        double guess = c.C_m * std::pow(tau, mp.sigma * e) * std::pow(std::log(tau), (mp.m + mp.sigma) * e);
        if (guess > kappa0)
            kappa0 = guess;
    }
    double lo = kappa0 / 4, hi = kappa0 * 4;
    auto flo = eval(lo), fhi = eval(hi);
    std::string samples;
    for (int expand = 0; flo.f1 > tau || fhi.f1 < tau; ++expand) {
        samples += " f'(" + std::to_string(lo) + ")=" + std::to_string(flo.f1) + " f'(" + std::to_string(hi) +
                   ")=" + std::to_string(fhi.f1);
        if (expand >= 8)
            throw NumericError("saddle bracket failed for tau = " + std::to_string(tau), samples);
        if (flo.f1 > tau) {
            hi = lo;
            fhi = flo;
            lo /= 4;
            flo = eval(lo);
        } else {
            lo = hi;
            flo = fhi;
            hi *= 4;
            fhi = eval(hi);
        }
    }
    double k = std::clamp(kappa0, lo, hi);
    auto cur = eval(k);
    int it = 0;
    for (; it < 200; ++it) {
        double r = cur.f1 - tau;
        if (std::abs(r) <= opt.tol * tau)
            break;
        if (r > 0)
            hi = k;
        else
            lo = k;
        double next = k - r / cur.f2;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-15 * hi)
            break;
        k = next;
        cur = eval(k);
    }
    if (std::abs(cur.f1 - tau) > opt.tol * tau * 10)
        throw NumericError("saddle Newton iteration did not converge", "f'=" + std::to_string(cur.f1));

    SaddleResult s;
    s.mp = mp;
    s.tau = tau;
    s.kappa = k;
    s.f = cur.f;
    s.f1 = cur.f1;
    s.f2 = cur.f2;
    s.cutoff_y = cur.cutoff_y;
    s.beyond_table = cur.beyond_table;
    s.cumulant_error = cur.error_estimate;
    s.iterations = it;
    return s;
}

// exp(-A_m tau^{1/(1-sigma)} (log tau)^{(m+sigma)/(1-sigma)}), the leading
// factor only.
inline double tail_asymptotic(const ModelPoint& mp, double tau)
{
    validate(mp);
    if (!(mp.sigma > 0.5 && mp.sigma < 1))
        throw DomainError("the tail asymptotic needs 1/2 < sigma < 1");
    if (!(tau > 1))
        throw DomainError("the tail asymptotic needs tau > 1");
    auto c = model_constants(mp.sigma, mp.m);
    double e = 1 / (1 - mp.sigma);
    return std::exp(-c.A_m * std::pow(tau, e) * std::pow(std::log(tau), (mp.m + mp.sigma) * e));
}

// Saddle approximation F(kappa) e^{-tau kappa} / (kappa sqrt(2 pi f''(kappa)))
// of P(Re e^{-i alpha} eta > tau), with relative error scale
// kappa^{-1/(2 sigma)} (log kappa)^{(m/sigma + 1)/2}.
inline SaddleResult tail_saddle(const ModelPoint& mp, double tau, const SaddleOptions& opt = {})
{
    auto s = solve_saddle(mp, tau, opt);
    if (s.kappa < opt.min_kappa)
        throw DomainError("saddle point kappa = " + std::to_string(s.kappa) + " is below min_kappa = " +
                          std::to_string(opt.min_kappa));
    double log_tail = s.f - tau * s.kappa - std::log(s.kappa * std::sqrt(two_pi * s.f2));
    s.tail_main = std::exp(log_tail);
    s.log10_tail_main = log_tail / std::log(10.0);
    double lk = std::log(s.kappa);
    s.error_scale = std::pow(s.kappa, -1 / (2 * mp.sigma)) * std::pow(std::max(lk, 0.0), (mp.m / mp.sigma + 1) / 2);
    if (mp.sigma > 0.5 && mp.sigma < 1 && tau > 1) {
        s.tail_asymptotic = tail_asymptotic(mp, tau);
        auto c = model_constants(mp.sigma, mp.m);
        double e = 1 / (1 - mp.sigma);
        s.log10_tail_asymptotic =
            -c.A_m * std::pow(tau, e) * std::pow(std::log(tau), (mp.m + mp.sigma) * e) / std::log(10.0);
    }
    return s;
}

//---------------------------------------------------------------------------//
// Tilted density
//---------------------------------------------------------------------------//

struct TiltedDensity {
    SaddleResult saddle;
    std::vector<double> xs, values, gaussian; // densities w.r.t. dx / sqrt(2 pi)
};

// N(x) = e^{kappa tau} e^{kappa x} M(x + tau) / F(kappa), the density of the
// exponentially tilted law shifted by tau. Computed on the shifted contour:
// its characteristic function is R(t) = F(kappa + it) / F(kappa), a product
// of per-prime tilted characteristic functions (quadrature nodes with tilted
// weights) times exp(i t m1 - t^2 m2 / 2 - i t^3 m3 / 6) for the remaining
// primes' cumulants.
inline TiltedDensity tilted_density(const ModelPoint& mp, double tau, const std::vector<double>& xs,
                                    const SaddleOptions& opt = {})
{
    auto s = solve_saddle(mp, tau, opt);
    auto ctx = shared_context(mp.sigma, mp.m);
    const double kappa = s.kappa;
    auto plan = detail::cumulant_plan(*ctx, kappa, mp.alpha, opt.cumulant);
    std::size_t nt = std::max(plan.quad_end, ctx->first_index_c1_below(0.5 / kappa));
    if (nt > 200000)
        throw CapacityError("tilted density needs " + std::to_string(nt) + " exact primes");

    // per-prime tilted node distributions, pruned of negligible weights
    struct Nodes {
        std::vector<double> y, w;
    };
    std::vector<Nodes> nodes(nt);
    parallel_blocks(nt, [&](std::size_t b, std::size_t e) {
        std::vector<double> y;
        for (std::size_t i = b; i < e; ++i) {
            std::size_t n = detail::mgf_nodes(kappa, ctx->sum_k2c(i));
            y.resize(n);
            detail::projection_nodes(ctx->coef(i), ctx->coef_count(i), mp.alpha, n, y.data());
            double top = *std::max_element(y.begin(), y.end()) * kappa, total = 0;
            std::vector<double> w(n);
            for (std::size_t j = 0; j < n; ++j)
                total += w[j] = std::exp(kappa * y[j] - top);
            for (std::size_t j = 0; j < n; ++j)
                if (w[j] > 1e-18 * total) {
                    nodes[i].y.push_back(y[j]);
                    nodes[i].w.push_back(w[j] / total);
                }
        }
    });
    double m1 = plan.beyond.f1, m2 = plan.beyond.f2, m3 = plan.beyond.f3;
    for (std::size_t i = nt; i < ctx->size(); ++i) {
        m1 += plan.bessel[i].f1;
        m2 += plan.bessel[i].f2;
        m3 += plan.bessel[i].f3;
    }
    auto ratio = [&](double t) {
        cplx prod = std::exp(cplx(-t * t * m2 / 2, t * m1 - t * t * t * m3 / 6));
        for (const auto& nd : nodes) {
            cplx sum = 0;
            for (std::size_t j = 0; j < nd.y.size(); ++j)
                sum += nd.w[j] * std::polar(1.0, t * nd.y[j]);
            prod *= sum;
        }
        return prod;
    };

    double x_max = 0;
    for (double x : xs)
        x_max = std::max(x_max, std::abs(x));
    const double sd = std::sqrt(s.f2);
    const double period = 2 * x_max + 30 * sd;
    const double dt = two_pi / period;
    std::vector<cplx> r{1.0};
    for (int quiet = 0; quiet < 3;) {
        double t = dt * double(r.size());
        if (t > 1e4 / sd)
            throw NumericError("tilted characteristic function does not decay");
        r.push_back(ratio(t));
        quiet = std::abs(r.back()) < 1e-14 ? quiet + 1 : 0;
    }

    TiltedDensity out;
    out.saddle = s;
    out.xs = xs;
    for (double x : xs) {
        double acc = 0.5;
        for (std::size_t j = 1; j < r.size(); ++j)
            acc += (r[j] * std::polar(1.0, -dt * double(j) * (x + tau))).real();
        out.values.push_back(2 * acc * dt / std::sqrt(two_pi));
        out.gaussian.push_back(std::exp(-x * x / (2 * s.f2)) / sd);
    }
    return out;
}

//---------------------------------------------------------------------------//
// Smoothed step function bracket
//---------------------------------------------------------------------------//

struct MellinBracket {
    double lower = 0, upper = 0;       // first integral minus second, and first integral
    double first = 0, second = 0;      // the two contour integrals
    double truncation_error = 0;
};

namespace detail {

// (1/2 pi) int_{-inf}^{inf} e^{omega (c + it)} / (c + it)^2 dt, whose exact
// value is max(omega, 0): Gauss-Legendre panels on [0, T] (the integrand at
// -t is the conjugate) plus the tail beyond T. For omega = 0 the tail is
// exact; otherwise one integration by parts, valid once |omega| T >= 4.
inline double mellin_term(double omega, double c, double T, double& err)
{
    static const auto gl = gauss_legendre(16);
    double width = std::min(0.5, 1.0 / std::abs(omega));
    long panels = long(std::ceil(T / width));
    double h = T / double(panels), sum = 0;
    for (long k = 0; k < panels; ++k) {
        double a = double(k) * h;
        for (std::size_t j = 0; j < gl.x.size(); ++j) {
            cplx s(c, a + 0.5 * h * (gl.x[j] + 1));
            sum += gl.w[j] * 0.5 * h * (std::exp(omega * s) / (s * s)).real();
        }
    }
    cplx sT(c, T);
    double tail = 0, scale = std::exp(omega * c) / pi;
    if (omega == 0) {
        tail = (cplx(0, -1) / sT).real();
    } else if (std::abs(omega) * T >= 4) {
        tail = (-std::exp(omega * sT) / (cplx(0, omega) * sT * sT)).real();
        err += scale * 2 / (omega * omega * T * T * T);
    } else {
        err += scale / T;
    }
    return (sum + tail) / pi;
}

} // namespace detail

// Numerical evaluation of the two contour integrals bracketing the step
// function chi(y) = [y > 1]:
//   first  = (1/2 pi i) int y^s (e^{lambda s} - 1)/(lambda s) ds/s
//   second = (1/2 pi i) int y^s (e^{lambda s} - 1)(1 - e^{-lambda s})/(lambda s^2) ds
// on Re s = c, with 0 <= first - chi(y) <= second. The truncation height
// doubles from 4000 until the tail estimate is below tol.
inline MellinBracket mellin_smoothing_bracket(double y, double c, double lambda, double tol = 1e-6)
{
    if (!(y > 0) || !(c > 0) || !(lambda > 0))
        throw ParameterError("mellin_smoothing_bracket needs y, c, lambda > 0");
    const double w = std::log(y);
    for (double T = 4000;; T *= 2) {
        double err = 0;
        double plus = detail::mellin_term(w + lambda, c, T, err);
        double zero = detail::mellin_term(w, c, T, err);
        double minus = detail::mellin_term(w - lambda, c, T, err);
        MellinBracket b;
        b.first = (plus - zero) / lambda;
        b.second = (plus - 2 * zero + minus) / lambda;
        b.truncation_error = 4 * err / lambda;
        b.upper = b.first;
        b.lower = b.first - b.second;
        if (b.truncation_error <= tol)
            return b;
        if (T >= 1e6)
            throw NumericError("contour truncation error above tolerance",
                               "estimate=" + std::to_string(b.truncation_error));
    }
}

} // namespace etadist
