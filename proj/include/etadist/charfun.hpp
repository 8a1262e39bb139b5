#pragma once

// Characteristic function Lambda(w) = E exp(i <eta, w>) of the random model
// and the densities obtained from it by Fourier inversion. Inner products are
// <z, w> = Re z Re w + Im z Im w; both z and w carry the measure dxdy/(2 pi).

#include "errors.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace etadist {

namespace detail {

// c_k = p^{-k sigma} / (k (k log p)^m) until c_k < 1e-18 c_1.
inline std::vector<double> local_coefficients(std::uint64_t p, double sigma, int m)
{
    std::vector<double> c;
    double lp = std::log(double(p)), r = std::pow(double(p), -sigma), rk = 1;
    for (int k = 1; k < 2000; ++k) {
        rk *= r;
        double v = rk / (k * std::pow(k * lp, m));
        if (k > 1 && (v < 1e-18 * c[0] || v < 1e-300))
            break;
        c.push_back(v);
    }
    return c;
}

constexpr int min_log2_nodes = 3, max_log2_nodes = 18;
using NodeRadii = std::array<double, max_log2_nodes + 1>;

// For each power of two N, the largest |w| at which the N-point periodic
// trapezoid of exp(i <eta_p(e^{i theta}), w>) has aliasing error below ~1e-16.
// Uses |f_hat(n)| <= exp(|w| S(a) - a n) with S(a) = sum c_k e^{k a}.
inline NodeRadii node_radii(const double* c, std::size_t count)
{
    NodeRadii out{};
    double r = count > 1 ? c[1] / c[0] : 0.5; // ratio of leading terms, an upper bound on p^{-sigma}
    r = std::max(r, 1e-300);
    double a_max = std::min(0.7 * std::log(1 / r), 30.0);
    constexpr int grid = 48;
    std::array<double, grid> a{}, s{};
    for (int j = 0; j < grid; ++j) {
        a[j] = a_max * (j + 1) / grid;
        double sum = 0, e = 1, ea = std::exp(a[j]);
        for (std::size_t k = 0; k < count; ++k) {
            e *= ea;
            sum += c[k] * e;
        }
        s[j] = sum;
    }
    const double log_budget = std::log(2 / 1e-16);
    for (int l = 0; l <= max_log2_nodes; ++l) {
        double n = std::ldexp(1.0, l), best = 0;
        for (int j = 0; j < grid; ++j)
            best = std::max(best, (a[j] * n - log_budget) / s[j]);
        out[l] = best;
    }
    return out;
}

inline int nodes_log2_for(const NodeRadii& radii, double rho)
{
    for (int l = min_log2_nodes; l <= max_log2_nodes; ++l)
        if (radii[l] >= rho)
            return l;
    throw CapacityError("characteristic function needs more than 2^18 nodes for one prime at |w| = " +
                        std::to_string(rho));
}

// eta_p(e^{2 pi i j / n}) for j < n.
inline void local_nodes(const double* c, std::size_t count, std::size_t n, double* re, double* im)
{
    for (std::size_t j = 0; j < n; ++j) {
        cplx z = std::polar(1.0, two_pi * double(j) / double(n));
        cplx acc = 0;
        for (std::size_t k = count; k-- > 0;)
            acc = (acc + c[k]) * z;
        re[j] = acc.real();
        im[j] = acc.imag();
    }
}

inline cplx local_trapezoid(const double* re, const double* im, std::size_t count, std::size_t stride, double u,
                            double v)
{
    double sc = 0, ss = 0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < count; j += stride, ++n) {
        double ph = re[j] * u + im[j] * v;
        sc += std::cos(ph);
        ss += std::sin(ph);
    }
    return {sc / double(n), ss / double(n)};
}

inline cplx local_cf(const std::vector<double>& c, cplx w, std::size_t n)
{
    std::vector<double> re(n), im(n);
    local_nodes(c.data(), c.size(), n, re.data(), im.data());
    return local_trapezoid(re.data(), im.data(), n, 1, w.real(), w.imag());
}

} // namespace detail

// Lambda_p(w) for a single prime by periodic trapezoid, doubling the node
// count from 64 until successive values differ by less than 1e-12.
inline cplx char_fn_local(const ModelPoint& mp, std::uint64_t p, cplx w)
{
    if (p < 2 || mp.sigma <= 0 || mp.m < 0)
        throw ParameterError("char_fn_local needs p >= 2, sigma > 0, m >= 0");
    auto c = detail::local_coefficients(p, mp.sigma, mp.m);
    cplx prev = detail::local_cf(c, w, 64);
    for (std::size_t n = 128; n <= (1u << 22); n *= 2) {
        cplx next = detail::local_cf(c, w, n);
        if (std::abs(next - prev) < 1e-12)
            return next;
        prev = next;
    }
    throw NumericError("char_fn_local did not converge", "|w|=" + std::to_string(std::abs(w)));
}

// Product of Lambda_p(w) over primes p <= Y with each local series truncated
// to p^k <= Y, i.e. the characteristic function of P_{m,Y}(sigma, X).
inline cplx char_fn_truncated(const ModelPoint& mp, const PrimePowerTable& table, cplx w)
{
    validate(mp);
    cplx prod = 1;
    for (auto p : table.primes) {
        std::vector<double> c;
        double lp = std::log(double(p));
        std::uint64_t n = p;
        for (int k = 1; n <= std::uint64_t(table.cutoff_y); ++k, n *= p)
            c.push_back(std::exp(-mp.sigma * k * lp) / (k * std::pow(k * lp, mp.m)));
        auto radii = detail::node_radii(c.data(), c.size());
        std::size_t nodes = std::size_t(1) << std::max(6, detail::nodes_log2_for(radii, std::abs(w)));
        prod *= detail::local_cf(c, w, nodes);
    }
    return prod;
}

struct CharFnValue {
    cplx value;
    double log_abs = 0;    // log |Lambda(w)|, finite even when value underflows
    double tail_error = 0; // bound on the dropped sixth-order cumulant terms
    std::size_t exact_primes = 0;
};

// Evaluator for Lambda(w) = prod_p Lambda_p(w). Primes with |w| c_1 above a
// threshold are integrated exactly; the remaining infinite tail enters through
// its cumulant expansion
//   log prod = -|w|^2/4 S2 - |w|^4/64 S4 - i |w|^2 Re(w) S3/8
// with S2 = sum_k c_k^2, S4 = c_1^4, S3 = c_1^2 c_2 summed over the tail
// (S2 continued beyond the prime table by an integral).
class CharFn {
  public:
    CharFn(double sigma, int m, double max_radius, std::shared_ptr<const ModelContext> ctx = nullptr,
           double z_threshold = 0.05)
        : sigma_(sigma), m_(m), max_radius_(max_radius), z_threshold_(z_threshold),
          ctx_(ctx ? std::move(ctx) : shared_context(sigma, m))
    {
        if (!(max_radius >= 0) || !(z_threshold > 0))
            throw ParameterError("CharFn needs max_radius >= 0 and z_threshold > 0");
        std::size_t count = max_radius > 0 ? ctx_->first_index_c1_below(z_threshold / max_radius) : 0;
        if (count >= ctx_->size())
            throw CapacityError("prime table too short for |w| = " + std::to_string(max_radius));
        prime_.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            auto& pn = prime_[i];
            pn.radii = detail::node_radii(ctx_->coef(i), ctx_->coef_count(i));
            pn.nodes = std::size_t(1) << detail::nodes_log2_for(pn.radii, max_radius);
            pn.offset = re_.size();
            re_.resize(re_.size() + pn.nodes);
            im_.resize(im_.size() + pn.nodes);
            detail::local_nodes(ctx_->coef(i), ctx_->coef_count(i), pn.nodes, re_.data() + pn.offset,
                                im_.data() + pn.offset);
        }
    }

    double sigma() const { return sigma_; }
    int m() const { return m_; }
    double max_radius() const { return max_radius_; }
    double z_threshold() const { return z_threshold_; }
    const ModelContext& context() const { return *ctx_; }

    // Number of primes integrated exactly at radius rho.
    std::size_t exact_count(double rho) const
    {
        return rho > 0 ? ctx_->first_index_c1_below(z_threshold_ / rho) : 0;
    }

    CharFnValue eval(cplx w) const
    {
        double rho = std::abs(w);
        CharFnValue out;
        if (rho == 0) {
            out.value = 1;
            return out;
        }
        std::size_t count = exact_count(rho);
        if (count >= ctx_->size())
            throw CapacityError("prime table too short for |w| = " + std::to_string(rho));
        const double u = w.real(), v = w.imag();
        cplx prod = 1;
        double scale = 0;
        std::vector<double> re, im;
        for (std::size_t i = 0; i < count; ++i) {
            cplx lam;
            if (i < prime_.size()) {
                const auto& pn = prime_[i];
                std::size_t n = std::size_t(1) << detail::nodes_log2_for(pn.radii, rho);
                if (n <= pn.nodes) {
                    lam = detail::local_trapezoid(re_.data() + pn.offset, im_.data() + pn.offset, pn.nodes,
                                                  pn.nodes / n, u, v);
                } else {
                    re.resize(n);
                    im.resize(n);
                    detail::local_nodes(ctx_->coef(i), ctx_->coef_count(i), n, re.data(), im.data());
                    lam = detail::local_trapezoid(re.data(), im.data(), n, 1, u, v);
                }
            } else {
                auto radii = detail::node_radii(ctx_->coef(i), ctx_->coef_count(i));
                std::size_t n = std::size_t(1) << detail::nodes_log2_for(radii, rho);
                re.resize(n);
                im.resize(n);
                detail::local_nodes(ctx_->coef(i), ctx_->coef_count(i), n, re.data(), im.data());
                lam = detail::local_trapezoid(re.data(), im.data(), n, 1, u, v);
            }
            prod *= lam;
            double a = std::abs(prod);
            if (a == 0) {
                out.value = 0;
                out.log_abs = -INFINITY;
                out.exact_primes = count;
                return out;
            }
            if (a < 1e-150) {
                scale += std::log(a);
                prod /= a;
            }
        }
        double rho2 = rho * rho;
        double s2 = ctx_->suffix_second_moment(count), s4 = ctx_->suffix_c1_fourth(count),
               s3 = ctx_->suffix_c1sq_c2(count);
        cplx tail(-rho2 / 4 * s2 - rho2 * rho2 / 64 * s4, -rho2 * u * s3 / 8);
        // next terms: the c_1 sixth cumulant and c_1^2 c_2^2 cross terms in the fourth
        double c1 = ctx_->c1(count), q = ctx_->c2(count) / c1;
        out.tail_error = rho2 * rho2 * rho2 * c1 * c1 * s4 / 576 + rho2 * rho2 * q * q * s4;
        out.exact_primes = count;
        out.log_abs = std::log(std::abs(prod)) + scale + tail.real();
        out.value = prod * std::exp(tail + scale);
        return out;
    }

    cplx operator()(cplx w) const { return eval(w).value; }

  private:
    struct PrimeNodes {
        detail::NodeRadii radii;
        std::size_t nodes = 0, offset = 0;
    };
    double sigma_;
    int m_;
    double max_radius_, z_threshold_;
    std::shared_ptr<const ModelContext> ctx_;
    std::vector<PrimeNodes> prime_;
    std::vector<double> re_, im_;
};

struct CharFnResult {
    cplx value;
    double log_abs = 0;
    double tail_error = 0;
    double cutoff_y = 0;     // largest prime integrated exactly
    double z_threshold = 0;
};

// Lambda(w) with the tail threshold lowered until the tail error estimate is
// below tol.
inline CharFnResult char_fn(const ModelPoint& mp, cplx w, double tol = 1e-10)
{
    validate(mp);
    if (!(tol > 0))
        throw ParameterError("tol must be positive");
    double z = 0.05;
    for (int attempt = 0; attempt < 30; ++attempt, z /= 2) {
        CharFn cf(mp.sigma, mp.m, std::abs(w), nullptr, z);
        auto v = cf.eval(w);
        if (v.tail_error <= tol || attempt == 29) {
            CharFnResult r{v.value, v.log_abs, v.tail_error, 0, z};
            r.cutoff_y = v.exact_primes ? double(cf.context().prime(v.exact_primes - 1)) : 0;
            return r;
        }
    }
    throw InternalError("unreachable");
}

//---------------------------------------------------------------------------//
// Decay scans
//---------------------------------------------------------------------------//

// max over 17 directions in the first quadrant of |Lambda(rho e^{i phi})|;
// the symmetries Lambda(conj w) = Lambda(w), Lambda(-w) = conj Lambda(w)
// cover the rest of the circle.
inline double max_abs_on_circle(const CharFn& cf, double rho)
{
    double best = 0;
    for (int k = 0; k <= 16; ++k)
        best = std::max(best, std::exp(cf.eval(std::polar(rho, pi / 2 * k / 16)).log_abs));
    return best;
}

struct InversionRadius {
    double radius = 0;
    double tail_bound = 0; // estimate of int_{|w| > radius} |Lambda| |dw|
};

// Smallest integer radius R with sum_{rho >= R} m(rho) rho <= budget, where
// m(rho) is the scanned maximum of |Lambda| on the circle |w| = rho.
inline InversionRadius inversion_radius(const CharFn& cf, double budget)
{
    std::vector<double> mass{0};
    for (int rho = 1;; ++rho) {
        if (rho > 4096)
            throw NumericError("characteristic function does not decay within |w| <= 4096");
        double v = max_abs_on_circle(cf, rho) * rho;
        mass.push_back(v);
        if (rho >= 4 && v < 1e-3 * budget && mass[rho - 1] < 1e-3 * budget)
            break;
    }
    double tail = 0;
    std::size_t r = mass.size();
    while (r > 1 && tail + mass[r - 1] <= budget)
        tail += mass[--r];
    return {double(r), tail};
}

struct DecayThreshold {
    double w0 = 0;       // |Lambda(w)| <= exp(-|w|^{1/(2 sigma)}) for scanned |w| >= w0
    double scan_max = 0; // largest radius scanned
    double step = 0;     // radial step near the origin; it grows to 2% of the radius
};

// Empirical threshold beyond which |Lambda(w)| <= exp(-|w|^{1/(2 sigma)}) on
// a radial scan (17 directions per quadrant). The scan always reaches at
// least 5 w0.
inline DecayThreshold calibrate_decay_threshold(const CharFn& cf, double step = 0.25, double scan_max = 64)
{
    DecayThreshold d;
    d.step = step;
    double last_violation = 0, rho = 0, next = step;
    const double expo = 1 / (2 * cf.sigma());
    while (true) {
        for (; next <= scan_max + 1e-12; next += std::max(step, 0.02 * next)) {
            rho = next;
            double bound = -std::pow(rho, expo);
            for (int k = 0; k <= 16; ++k)
                if (cf.eval(std::polar(rho, pi / 2 * k / 16)).log_abs > bound) {
                    last_violation = rho;
                    break;
                }
        }
        d.w0 = last_violation + std::max(step, 0.02 * last_violation);
        if (5 * d.w0 <= scan_max || scan_max >= 4096)
            break;
        scan_max = std::min(4096.0, 5.5 * d.w0);
    }
    d.scan_max = rho;
    return d;
}

//---------------------------------------------------------------------------//
// Two-dimensional density
//---------------------------------------------------------------------------//

struct DensityOptions {
    bool auto_extend = true;      // double the extent while edge values exceed 1e-8
    double inversion_radius = 0;  // 0 selects it from the decay scan
    double z_threshold = 0.05;
    bool calibrate_decay = true;  // record the decay threshold in the metadata
};

// Values on the nodes x_i = -extent + i step, row-major with rows indexed by
// y: values[iy * n + ix]. Densities are with respect to dxdy/(2 pi).
struct DensityGrid {
    ModelPoint mp;
    double extent = 0, step = 0, tol = 0;
    std::size_t n = 0;
    std::vector<double> values, raw_values;
    double cutoff_y = 0;
    double inversion_radius = 0, w_step = 0, period = 0;
    double truncation_error = 0; // estimated int_{|w| > radius} |Lambda| |dw|
    double normalization_residual = 0;
    double min_raw = 0, max_edge = 0;
    double decay_threshold = 0;
    std::size_t w_nodes = 0;

    double coord(std::size_t i) const { return -extent + double(i) * step; }
    double at(std::size_t ix, std::size_t iy) const { return values[iy * n + ix]; }
    double raw_at(std::size_t ix, std::size_t iy) const { return raw_values[iy * n + ix]; }
};

namespace detail {

inline DensityGrid density_grid_once(const ModelPoint& mp, double extent, double step, double tol,
                                     const DensityOptions& opt)
{
    DensityGrid g;
    g.mp = mp;
    g.extent = extent;
    g.step = step;
    g.tol = tol;
    double cells = 2 * extent / step;
    g.n = std::size_t(std::llround(cells)) + 1;
    if (std::abs(cells - std::round(cells)) > 1e-9 * cells)
        throw ParameterError("extent must be a multiple of step");

    auto ctx = shared_context(mp.sigma, mp.m);
    g.cutoff_y = ctx->cutoff();
    {
        CharFn probe(mp.sigma, mp.m, 64, ctx, opt.z_threshold);
        if (opt.inversion_radius > 0) {
            g.inversion_radius = opt.inversion_radius;
        } else {
            auto ir = inversion_radius(probe, tol / 2);
            g.inversion_radius = ir.radius;
            g.truncation_error = ir.tail_bound;
        }
        if (opt.calibrate_decay)
            g.decay_threshold = calibrate_decay_threshold(probe).w0;
    }
    g.period = std::max(4 * extent, 2 * extent + 12);
    g.w_step = two_pi / g.period;
    const double rw = g.inversion_radius, dw = g.w_step;
    const std::size_t na = std::size_t(rw / dw) + 1;
    CharFn cf(mp.sigma, mp.m, rw, ctx, opt.z_threshold);

    // Lambda on the quadrant u, v >= 0 inside the disc |w| <= rw
    std::vector<cplx> lam(na * na, cplx(0));
    parallel_blocks(na, [&](std::size_t b, std::size_t e) {
        for (std::size_t a = b; a < e; ++a)
            for (std::size_t c = 0; c < na; ++c) {
                double u = a * dw, v = c * dw;
                if (u * u + v * v <= rw * rw)
                    lam[a * na + c] = cf(cplx(u, v));
            }
    });
    for (const auto& x : lam)
        g.w_nodes += x != cplx(0);

    // v-transform: phi[a][j] = 2 sum_c omega_c cos(y_j v_c) Lambda(u_a, v_c)
    const std::size_t n = g.n;
    std::vector<cplx> phi(na * n);
    parallel_blocks(na, [&](std::size_t b, std::size_t e) {
        for (std::size_t a = b; a < e; ++a)
            for (std::size_t j = 0; j < n; ++j) {
                double y = g.coord(j);
                cplx s = 0;
                for (std::size_t c = 0; c < na; ++c)
                    s += (c == 0 ? 0.5 : 1.0) * std::cos(y * c * dw) * lam[a * na + c];
                phi[a * n + j] = 2.0 * s;
            }
    });
    // u-transform: M(x_i, y_j) = dw^2/(2 pi) 2 Re sum_a omega_a e^{-i x_i u_a} phi[a][j]
    g.raw_values.assign(n * n, 0);
    parallel_blocks(n, [&](std::size_t b, std::size_t e) {
        std::vector<cplx> ex(na);
        for (std::size_t i = b; i < e; ++i) {
            double x = g.coord(i);
            for (std::size_t a = 0; a < na; ++a)
                ex[a] = (a == 0 ? 0.5 : 1.0) * std::polar(1.0, -x * a * dw);
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0;
                for (std::size_t a = 0; a < na; ++a)
                    s += (ex[a] * phi[a * n + j]).real();
                g.raw_values[j * n + i] = dw * dw / two_pi * 2 * s;
            }
        }
    });
    g.values.resize(n * n);
    double total = 0;
    g.min_raw = INFINITY;
    for (std::size_t k = 0; k < n * n; ++k) {
        g.values[k] = std::max(0.0, g.raw_values[k]);
        g.min_raw = std::min(g.min_raw, g.raw_values[k]);
        total += g.values[k];
    }
    g.normalization_residual = total * step * step / two_pi - 1;
    for (std::size_t k = 0; k < n; ++k)
        g.max_edge = std::max({g.max_edge, g.values[k], g.values[(n - 1) * n + k], g.values[k * n],
                               g.values[k * n + n - 1]});
    return g;
}

} // namespace detail

// Density M(z) on [-extent, extent]^2 by 2D Fourier inversion of Lambda with
// the trapezoid rule on the disc |w| <= R_w (period of the w-lattice at least
// 4 extent, so aliased mass is negligible). Negative ringing is clipped in
// values and kept in raw_values.
inline DensityGrid density_grid(const ModelPoint& mp, double extent, double step, double tol,
                                const DensityOptions& opt = {})
{
    validate(mp);
    if (!(extent > 0) || !(step > 0) || !(tol > 0))
        throw ParameterError("extent, step and tol must be positive");
    auto g = detail::density_grid_once(mp, extent, step, tol, opt);
    while (opt.auto_extend && g.max_edge > 1e-8 && extent < 64) {
        extent *= 2;
        g = detail::density_grid_once(mp, extent, step, tol, opt);
    }
    if (std::abs(g.normalization_residual) > 10 * tol)
        throw NumericError("density normalization check failed",
                           "residual=" + std::to_string(g.normalization_residual) +
                               " extent=" + std::to_string(g.extent));
    return g;
}

//---------------------------------------------------------------------------//
// Marginal density of Re(e^{-i alpha} eta)
//---------------------------------------------------------------------------//

// phi(t) = Lambda(t e^{i alpha}) sampled on t_j = j dt, dt = 2 pi / P, for
// the 1D inversions with respect to |dx| = dx / sqrt(2 pi).
class MarginalInversion {
  public:
    MarginalInversion(const ModelPoint& mp, double x_max, double tol, double z_threshold = 0.05)
        : mp_(mp), tol_(tol)
    {
        validate(mp);
        if (!(tol > 0))
            throw ParameterError("tol must be positive");
        x_max = std::abs(x_max);
        period_ = std::max({4 * x_max, 2 * x_max + 24, 48.0});
        dt_ = two_pi / period_;
        auto ctx = shared_context(mp.sigma, mp.m);
        const cplx dir = std::polar(1.0, mp.alpha);
        // truncation: stop once |phi(t)| t stays below tol * 1e-3
        double t_end = 4;
        {
            CharFn probe(mp.sigma, mp.m, 64, ctx, z_threshold);
            int quiet = 0;
            for (double t = 1;; t += 1) {
                if (t > 4096)
                    throw NumericError("marginal characteristic function does not decay");
                double v = std::exp(probe.eval(t * dir).log_abs);
                quiet = v * std::max(1.0, t) < 1e-3 * tol ? quiet + 1 : 0;
                if (t >= 4 && quiet >= 2) {
                    t_end = t;
                    break;
                }
            }
        }
        t_max_ = t_end;
        std::size_t count = std::size_t(t_end / dt_) + 1;
        CharFn cf(mp.sigma, mp.m, t_end, ctx, z_threshold);
        phi_.resize(count);
        parallel_for(count, [&](std::size_t j) { phi_[j] = cf(double(j) * dt_ * dir); });
    }

    double t_max() const { return t_max_; }
    double period() const { return period_; }

    // density with respect to |dx| = dx/sqrt(2 pi)
    double density(double x) const
    {
        double s = 0.5 * phi_[0].real();
        for (std::size_t j = 1; j < phi_.size(); ++j)
            s += (phi_[j] * std::polar(1.0, -x * double(j) * dt_)).real();
        return 2 * s * dt_ / std::sqrt(two_pi);
    }

    // P(Re e^{-i alpha} eta <= x) by the Gil-Pelaez formula (the mean is 0).
    double cdf(double x) const { return 0.5 - gil_pelaez(x) / pi; }
    // P(Re e^{-i alpha} eta > x)
    double tail(double x) const { return 0.5 + gil_pelaez(x) / pi; }

  private:
    // int_0^inf Im(e^{-itx} phi(t))/t dt, trapezoid on the t-lattice
    double gil_pelaez(double x) const
    {
        double s = -0.5 * x;
        for (std::size_t j = 1; j < phi_.size(); ++j) {
            double t = double(j) * dt_;
            s += (phi_[j] * std::polar(1.0, -x * t)).imag() / t;
        }
        return s * dt_;
    }

    ModelPoint mp_;
    double tol_;
    double period_ = 0, dt_ = 0, t_max_ = 0;
    std::vector<cplx> phi_;
};

struct MarginalDensity {
    ModelPoint mp;
    std::vector<double> xs, values, raw_values;
    double tol = 0;
};

// M(x; alpha) on xs, with respect to |dx| = dx / sqrt(2 pi).
inline MarginalDensity marginal_density(const ModelPoint& mp, const std::vector<double>& xs, double tol = 1e-8)
{
    double x_max = 0;
    for (double x : xs)
        x_max = std::max(x_max, std::abs(x));
    MarginalInversion inv(mp, x_max, tol);
    MarginalDensity out;
    out.mp = mp;
    out.xs = xs;
    out.tol = tol;
    for (double x : xs) {
        double v = inv.density(x);
        out.raw_values.push_back(v);
        out.values.push_back(std::max(0.0, v));
    }
    return out;
}

} // namespace etadist
