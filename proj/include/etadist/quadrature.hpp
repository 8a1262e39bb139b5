#pragma once

// One-dimensional quadrature: adaptive Gauss-Kronrod (7/15) and fixed
// Gauss-Legendre rules.

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace etadist {

struct QuadResult {
    double value = 0;
    double error = 0;
    std::size_t evaluations = 0;
};

namespace detail {

// 15-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights at odd positions.
inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss7_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template<class F>
std::pair<double, double> gk15(F& f, double a, double b)
{
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double k = fc * kronrod_w[7], g = fc * gauss7_w[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * kronrod_x[j];
        double s = f(c - dx) + f(c + dx);
        k += kronrod_w[j] * s;
        if (j % 2 == 1)
            g += gauss7_w[j / 2] * s;
    }
    return {k * h, std::abs((k - g) * h)};
}

} // namespace detail

// Adaptive bisection on the interval with the largest error estimate until
// the total estimate is below max(abs_tol, rel_tol*|value|).
template<class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 0,
                     std::size_t max_intervals = 20000)
{
    struct Piece {
        double a, b, value, error;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    std::priority_queue<Piece> heap;
    QuadResult r;
    auto [v, e] = detail::gk15(f, a, b);
    heap.push({a, b, v, e});
    r.evaluations = 15;
    double total = v, err = e;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (heap.size() >= max_intervals)
            throw NumericError("adaptive quadrature did not converge",
                               "value=" + std::to_string(total) + " error=" + std::to_string(err));
        Piece p = heap.top();
        heap.pop();
        double m = 0.5 * (p.a + p.b);
        auto [v1, e1] = detail::gk15(f, p.a, m);
        auto [v2, e2] = detail::gk15(f, m, p.b);
        r.evaluations += 30;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        heap.push({p.a, m, v1, e1});
        heap.push({m, p.b, v2, e2});
    }
    // re-add in a fixed order to limit cancellation drift in the running sums
    total = 0;
    err = 0;
    std::vector<Piece> pieces;
    while (!heap.empty()) {
        pieces.push_back(heap.top());
        heap.pop();
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    for (const auto& p : pieces) {
        total += p.value;
        err += p.error;
    }
    r.value = total;
    r.error = err;
    return r;
}

// Integral over [a, inf) through the map x = a + s/(1-s).
template<class F>
QuadResult integrate_to_infinity(F&& f, double a, double abs_tol, double rel_tol = 0)
{
    auto g = [&](double s) {
        if (s >= 1)
            return 0.0;
        double d = 1 - s;
        return f(a + s / d) / (d * d);
    };
    return integrate(g, 0.0, 1.0, abs_tol, rel_tol);
}

struct GaussRule {
    std::vector<double> x, w; // on [-1, 1]
};

// Gauss-Legendre nodes and weights by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n)
{
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2 / ((1 - x * x) * dp * dp);
    }
    return r;
}

} // namespace etadist
