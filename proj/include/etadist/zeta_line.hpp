#pragma once

// The deterministic side: P_{m,Y}(sigma + it) along t in [T, 2T], exact
// time averages of its mixed moments, empirical measures on a uniform t-grid,
// and the rectangle discrepancy against a model density grid.

#include "arith.hpp"
#include "charfun.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "random_model.hpp"
#include "specfun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

namespace etadist {

namespace detail {

inline constexpr long double two_pi_l = 6.283185307179586476925286766559005768L;

// e^{-i t log n} with the phase reduced in 80-bit arithmetic
inline cplx unit_phase(long double t, long double log_n)
{
    long double ph = std::fmod(t * log_n, two_pi_l);
    return {double(std::cos(ph)), -double(std::sin(ph))};
}

struct PolyTerms {
    std::vector<double> weight;
    std::vector<long double> log_n;
};

inline PolyTerms poly_terms(const PrimePowerTable& table, double sigma, int m)
{
    PolyTerms t;
    for (const auto& pp : table.prime_powers) {
        t.weight.push_back(prime_power_weight(pp, sigma, m));
        t.log_n.push_back(std::log((long double)pp.n));
    }
    return t;
}

} // namespace detail

// P_{m,Y}(sigma + it) = sum_{p^k <= Y} p^{-ikt} / (k p^{k sigma} (k log p)^m),
// Y = table.cutoff_y.
inline cplx dirichlet_poly(const ModelPoint& mp, const PrimePowerTable& table, double t)
{
    validate(mp);
    auto terms = detail::poly_terms(table, mp.sigma, mp.m);
    cplx sum = 0;
    for (std::size_t i = 0; i < terms.weight.size(); ++i)
        sum += terms.weight[i] * detail::unit_phase(t, terms.log_n[i]);
    return sum;
}

// (1/T) int_T^{2T} P^k conj(P)^l dt in closed form. P^k conj(P)^l expands
// into a double sum over products a (k factors) and b (l factors) of
// (b/a)^{it}; each integrates to (r^{2iT} - r^{iT}) / (i log r), r = b/a,
// or to T when a = b.
inline cplx exact_time_moment(const ModelPoint& mp, const PrimePowerTable& table, int k, int l, double T)
{
    validate(mp);
    if (!(T > 0))
        throw ParameterError("T must be positive");
    detail::check_enumeration(table, k, l);
    auto a = detail::product_distribution(table, mp.sigma, mp.m, k);
    auto b = k == l ? a : detail::product_distribution(table, mp.sigma, mp.m, l);
    std::vector<long double> log_b(b.size());
    for (std::size_t j = 0; j < b.size(); ++j)
        log_b[j] = std::log((long double)b[j].first);

    std::vector<std::complex<long double>> partial(a.size());
    const long double TT = T;
    parallel_for(a.size(), [&](std::size_t i) {
        long double la = std::log((long double)a[i].first);
        std::complex<long double> acc = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            long double w = (long double)a[i].second * b[j].second;
            if (a[i].first == b[j].first) {
                acc += w;
                continue;
            }
            long double lr = log_b[j] - la;
            long double p2 = std::fmod(2 * TT * lr, detail::two_pi_l), p1 = std::fmod(TT * lr, detail::two_pi_l);
            std::complex<long double> diff(std::cos(p2) - std::cos(p1), std::sin(p2) - std::sin(p1));
            acc += w * diff / (std::complex<long double>(0, 1) * lr * TT);
        }
        partial[i] = acc;
    });
    std::complex<long double> sum = 0;
    for (const auto& v : partial)
        sum += v;
    return {double(sum.real()), double(sum.imag())};
}

//---------------------------------------------------------------------------//
// Empirical measure
//---------------------------------------------------------------------------//

struct EmpiricalMeasure {
    ModelPoint mp;
    double T = 0;
    double cutoff_y = 0;
    double t_step = 0;
    std::vector<cplx> samples;       // P_{m,Y}(sigma + i t_j), t_j = T + j t_step
    std::vector<double> sorted_proj; // sorted Re(e^{-i alpha} P)

    double t_at(std::size_t j) const { return T + double(j) * t_step; }

    // fraction of samples with Re(e^{-i alpha} P) <= x
    double cdf(double x) const
    {
        auto it = std::upper_bound(sorted_proj.begin(), sorted_proj.end(), x);
        return double(it - sorted_proj.begin()) / double(sorted_proj.size());
    }
};

// Samples P_{m,Y}(sigma + it) at t_j = T + j T / n, j = 0..n. Each block of
// 64 consecutive samples starts from phases reduced in 80-bit arithmetic and
// advances by multiplication with e^{-i (T/n) log n}; blocks are fixed, so
// the result does not depend on the thread count.
inline EmpiricalMeasure empirical_measure(const ModelPoint& mp, const PrimePowerTable& table, double T,
                                         std::int64_t n_samples)
{
    validate(mp);
    if (!(T > 0) || !std::isfinite(T))
        throw ParameterError("T must be positive and finite");
    if (n_samples < 1000)
        throw ParameterError("n_samples must be >= 1000");
    EmpiricalMeasure em;
    em.mp = mp;
    em.T = T;
    em.cutoff_y = table.cutoff_y;
    em.t_step = T / double(n_samples);
    const std::size_t count = std::size_t(n_samples) + 1;
    em.samples.assign(count, cplx(0));

    auto terms = detail::poly_terms(table, mp.sigma, mp.m);
    const std::size_t np = terms.weight.size();
    const long double step = (long double)T / (long double)n_samples;
    std::vector<cplx> rot(np);
    for (std::size_t i = 0; i < np; ++i)
        rot[i] = detail::unit_phase(step, terms.log_n[i]);

    constexpr std::size_t block = 64;
    const std::size_t blocks = (count + block - 1) / block;
    parallel_blocks(blocks, [&](std::size_t b0, std::size_t b1) {
        std::vector<cplx> z(np);
        for (std::size_t b = b0; b < b1; ++b) {
            std::size_t j0 = b * block, j1 = std::min(count, j0 + block);
            long double t0 = (long double)T + (long double)j0 * step;
            for (std::size_t i = 0; i < np; ++i)
                z[i] = terms.weight[i] * detail::unit_phase(t0, terms.log_n[i]);
            for (std::size_t j = j0; j < j1; ++j) {
                cplx acc = 0;
                for (std::size_t i = 0; i < np; ++i) {
                    acc += z[i];
                    z[i] *= rot[i];
                }
                em.samples[j] = acc;
            }
        }
    });
    em.sorted_proj = sorted_projections(em.samples, mp.alpha);
    return em;
}

// Cutoff and threshold for replacing eta by P_{m,Y} on [T, 2T]:
// Y = (log T)^{5/(sigma - 1/2)} capped at y_cap, and the large-value
// threshold W Y^{1/2 - sigma} with W = a (log T) (log log T)^{-m-1}.
struct SurrogateChoice {
    double y = 0, y_uncapped = 0;
    bool capped = false;
    double w = 0, threshold = 0;
};

inline SurrogateChoice surrogate_choice(const ModelPoint& mp, double T, double y_cap = 1e4, double a = 1)
{
    validate(mp);
    if (!(mp.sigma > 0.5))
        throw DomainError("surrogate choice needs sigma > 1/2");
    if (!(T > std::exp(std::exp(1.0))))
        throw DomainError("surrogate choice needs log log T > 1");
    SurrogateChoice s;
    double lt = std::log(T);
    s.y_uncapped = std::pow(lt, 5 / (mp.sigma - 0.5));
    s.capped = s.y_uncapped > y_cap;
    s.y = std::min(s.y_uncapped, y_cap);
    s.w = a * lt * std::pow(std::log(lt), -mp.m - 1);
    s.threshold = s.w * std::pow(s.y, 0.5 - mp.sigma);
    return s;
}

//---------------------------------------------------------------------------//
// Rectangles and discrepancy
//---------------------------------------------------------------------------//

struct Rectangle {
    double c1 = 0, d1 = 0, c2 = 0, d2 = 0; // (c1, d1) x i(c2, d2)

    bool contains(cplx z) const { return z.real() > c1 && z.real() < d1 && z.imag() > c2 && z.imag() < d2; }
};

struct RectangleFamily {
    double limit = 0; // every rectangle lies in [-limit, limit]^2
    std::vector<Rectangle> rectangles;
};

inline void validate(const RectangleFamily& rf)
{
    if (rf.rectangles.empty())
        throw ParameterError("rectangle family is empty");
    for (const auto& r : rf.rectangles)
        if (!(r.c1 < r.d1) || !(r.c2 < r.d2))
            throw ParameterError("rectangle needs c1 < d1 and c2 < d2");
}

// Rectangles with corners on a grid_points x grid_points lattice over
// [-limit, limit]^2, limit = log log T. When there are more than
// max_count, every s-th pair (x-interval, y-interval) in lexicographic
// order is kept with s the smallest stride giving <= max_count; s is made
// coprime to the number of intervals so every x-interval meets a spread of
// y-intervals.
inline RectangleFamily default_rectangle_family(double T, int grid_points = 41, std::size_t max_count = 100000)
{
    if (!(T > std::exp(1.0)))
        throw ParameterError("default rectangle family needs T > e");
    if (grid_points < 2)
        throw ParameterError("grid_points must be >= 2");
    RectangleFamily rf;
    rf.limit = std::log(std::log(T));
    std::vector<double> edge(grid_points);
    for (int i = 0; i < grid_points; ++i)
        edge[i] = -rf.limit + 2 * rf.limit * i / (grid_points - 1);
    std::vector<std::pair<double, double>> iv;
    for (int i = 0; i < grid_points; ++i)
        for (int j = i + 1; j < grid_points; ++j)
            iv.emplace_back(edge[i], edge[j]);
    const std::size_t n = iv.size(), total = n * n;
    std::size_t stride = std::max<std::size_t>(1, (total + max_count - 1) / max_count);
    while (stride > 1 && std::gcd(stride, n) != 1)
        ++stride;
    for (std::size_t q = 0; q < total; q += stride) {
        const auto& x = iv[q / n];
        const auto& y = iv[q % n];
        rf.rectangles.push_back({x.first, x.second, y.first, y.second});
    }
    return rf;
}

struct DiscrepancyReport {
    double T = 0, cutoff_y = 0;
    std::size_t family_size = 0;
    double value = 0; // max |empirical - model| over the family
    Rectangle argmax;
    double empirical_at_argmax = 0, model_at_argmax = 0;
    std::size_t n_samples = 0;
};

namespace detail {

inline constexpr std::size_t max_edges = 4096;

inline std::vector<double> distinct_edges(const RectangleFamily& rf, bool real_axis)
{
    std::vector<double> e;
    for (const auto& r : rf.rectangles) {
        e.push_back(real_axis ? r.c1 : r.c2);
        e.push_back(real_axis ? r.d1 : r.d2);
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    if (e.size() > max_edges)
        throw CapacityError("rectangle family has " + std::to_string(e.size()) + " distinct edges, limit 4096");
    return e;
}

// int_{-inf}^{e} of the hat function centred at node i (spacing h)
inline double hat_integral(double e, double node, double h)
{
    double s = (e - node) / h;
    double v;
    if (s <= -1)
        v = 0;
    else if (s <= 0)
        v = 0.5 * (1 + s) * (1 + s);
    else if (s <= 1)
        v = 1 - 0.5 * (1 - s) * (1 - s);
    else
        v = 1;
    return v * h;
}

} // namespace detail

// Model probability of every rectangle in the family, integrating the
// bilinear interpolant of the grid exactly, and empirical fractions from
// 2D prefix counts over the distinct edges. Rectangles must lie inside the
// grid extent.
inline DiscrepancyReport discrepancy(const EmpiricalMeasure& em, const DensityGrid& dg, const RectangleFamily& rf)
{
    validate(rf);
    if (em.samples.empty())
        throw ParameterError("empirical measure is empty");
    for (const auto& r : rf.rectangles)
        if (r.c1 < -dg.extent || r.d1 > dg.extent || r.c2 < -dg.extent || r.d2 > dg.extent)
            throw ParameterError("rectangle outside the density grid extent " + std::to_string(dg.extent));
    auto ex = detail::distinct_edges(rf, true), ey = detail::distinct_edges(rf, false);
    const std::size_t nx = ex.size(), ny = ey.size(), n = dg.n;

    // a sample's cell is (number of x-edges below it, number of y-edges below it)
    std::vector<std::uint32_t> cells((nx + 1) * (ny + 1), 0);
    for (const auto& z : em.samples) {
        // open rectangles: a sample on an edge counts on neither side of it
        auto cx = std::lower_bound(ex.begin(), ex.end(), z.real()) - ex.begin();
        auto cy = std::lower_bound(ey.begin(), ey.end(), z.imag()) - ey.begin();
        bool on_x = std::size_t(cx) < nx && ex[cx] == z.real();
        bool on_y = std::size_t(cy) < ny && ey[cy] == z.imag();
        if (on_x || on_y)
            continue;
        ++cells[std::size_t(cy) * (nx + 1) + std::size_t(cx)];
    }
    // P(i, j) = number of samples in cells with cx < i and cy < j
    std::vector<std::uint64_t> prefix((nx + 2) * (ny + 2), 0);
    auto P = [&](std::size_t i, std::size_t j) -> std::uint64_t& { return prefix[j * (nx + 2) + i]; };
    for (std::size_t j = 1; j <= ny + 1; ++j)
        for (std::size_t i = 1; i <= nx + 1; ++i)
            P(i, j) = cells[(j - 1) * (nx + 1) + (i - 1)] + P(i - 1, j) + P(i, j - 1) - P(i - 1, j - 1);
    // ex[a] < x < ex[b] exactly when a < cx <= b
    auto count = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
        return double(P(b + 1, d + 1) - P(a + 1, d + 1) - P(b + 1, c + 1) + P(a + 1, c + 1));
    };

    // F[iy][ix] = int_{x < ex[ix], y < ey[iy]} M dx dy / (2 pi)
    std::vector<double> hx(nx * n), hy(ny * n);
    for (std::size_t e = 0; e < nx; ++e)
        for (std::size_t i = 0; i < n; ++i)
            hx[e * n + i] = detail::hat_integral(ex[e], dg.coord(i), dg.step);
    for (std::size_t e = 0; e < ny; ++e)
        for (std::size_t i = 0; i < n; ++i)
            hy[e * n + i] = detail::hat_integral(ey[e], dg.coord(i), dg.step);
    // tmp[iy][ix] = sum_j hy[iy][j] values[j][ix]
    std::vector<double> tmp(ny * n, 0);
    parallel_for(ny, [&](std::size_t e) {
        for (std::size_t j = 0; j < n; ++j) {
            double w = hy[e * n + j];
            if (w == 0)
                continue;
            for (std::size_t i = 0; i < n; ++i)
                tmp[e * n + i] += w * dg.values[j * n + i];
        }
    });
    std::vector<double> F(ny * nx, 0);
    parallel_for(ny, [&](std::size_t e) {
        for (std::size_t f = 0; f < nx; ++f) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i)
                s += tmp[e * n + i] * hx[f * n + i];
            F[e * nx + f] = s / two_pi;
        }
    });

    const double total = double(em.samples.size());
    std::vector<double> diff(rf.rectangles.size()), emp(rf.rectangles.size()), mod(rf.rectangles.size());
    parallel_for(rf.rectangles.size(), [&](std::size_t q) {
        const auto& r = rf.rectangles[q];
        std::size_t a = std::lower_bound(ex.begin(), ex.end(), r.c1) - ex.begin();
        std::size_t b = std::lower_bound(ex.begin(), ex.end(), r.d1) - ex.begin();
        std::size_t c = std::lower_bound(ey.begin(), ey.end(), r.c2) - ey.begin();
        std::size_t d = std::lower_bound(ey.begin(), ey.end(), r.d2) - ey.begin();
        double e = count(a, b, c, d) / total;
        double m = F[d * nx + b] - F[d * nx + a] - F[c * nx + b] + F[c * nx + a];
        emp[q] = e;
        mod[q] = m;
        diff[q] = std::abs(e - m);
    });
    std::size_t best = std::max_element(diff.begin(), diff.end()) - diff.begin();
    DiscrepancyReport rep;
    rep.T = em.T;
    rep.cutoff_y = em.cutoff_y;
    rep.family_size = rf.rectangles.size();
    rep.value = diff[best];
    rep.argmax = rf.rectangles[best];
    rep.empirical_at_argmax = emp[best];
    rep.model_at_argmax = mod[best];
    rep.n_samples = em.samples.size();
    return rep;
}

//---------------------------------------------------------------------------//
// Smoothed indicator cross-check
//---------------------------------------------------------------------------//

namespace detail {

// smoothed_indicator tabulated at spacing 1/(128 L) with four-point Lagrange
// interpolation; the function is band-limited to frequency L, so the
// interpolation error is about (2 pi / 128)^4 / 24 relative.
class SmoothedTable {
  public:
    SmoothedTable(const BSParams& bs, double lo, double hi) : h_(1 / (128 * bs.L))
    {
        lo_ = lo - 4 * h_;
        std::size_t n = std::size_t(std::ceil((hi + 4 * h_ - lo_) / h_)) + 1;
        v_.resize(n);
        parallel_for(n, [&](std::size_t i) { v_[i] = smoothed_indicator(lo_ + double(i) * h_, bs); });
    }
    double operator()(double x) const
    {
        double s = (x - lo_) / h_;
        std::size_t i = std::clamp<std::size_t>(std::size_t(s), 1, v_.size() - 3);
        double u = s - double(i);
        const double *f = &v_[i - 1];
        return -u * (u - 1) * (u - 2) / 6 * f[0] + (u + 1) * (u - 1) * (u - 2) / 2 * f[1] -
               (u + 1) * u * (u - 2) / 2 * f[2] + (u + 1) * u * (u - 1) / 6 * f[3];
    }

  private:
    double h_, lo_;
    std::vector<double> v_;
};

} // namespace detail

struct BSCrosscheck {
    double plain = 0;       // fraction of samples inside the rectangle
    double smoothed = 0;    // mean of the smoothed indicator W_{L,R}
    double error_bound = 0; // mean of K(L(x - c1)) + K(L(x - d1)) + K(L(y - c2)) + K(L(y - d2))
    double L = 0;
};

// Rectangle probability two ways: counting, and averaging the product of the
// one-dimensional Beurling-Selberg smoothed indicators of both sides.
inline BSCrosscheck bs_discrepancy_crosscheck(const EmpiricalMeasure& em, const Rectangle& rect, double L)
{
    if (em.samples.empty())
        throw ParameterError("empirical measure is empty");
    BSParams bx{L, rect.c1, rect.d1}, by{L, rect.c2, rect.d2};
    validate(bx);
    validate(by);
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto& z : em.samples) {
        xlo = std::min(xlo, z.real());
        xhi = std::max(xhi, z.real());
        ylo = std::min(ylo, z.imag());
        yhi = std::max(yhi, z.imag());
    }
    detail::SmoothedTable wx(bx, xlo, xhi), wy(by, ylo, yhi);
    BSCrosscheck out;
    out.L = L;
    double inside = 0, sm = 0, err = 0;
    for (const auto& z : em.samples) {
        inside += rect.contains(z);
        sm += wx(z.real()) * wy(z.imag());
        err += bs_K(L * (z.real() - rect.c1)) + bs_K(L * (z.real() - rect.d1)) + bs_K(L * (z.imag() - rect.c2)) +
               bs_K(L * (z.imag() - rect.d2));
    }
    double n = double(em.samples.size());
    out.plain = inside / n;
    out.smoothed = sm / n;
    out.error_bound = err / n;
    return out;
}

// L = (log T)^sigma (log log T)^m, the smoothing scale for horizon T
inline double bs_scale(const ModelPoint& mp, double T)
{
    double lt = std::log(T);
    return std::pow(lt, mp.sigma) * std::pow(std::log(lt), mp.m);
}

} // namespace etadist
