#pragma once

// Model parameters (sigma, m, alpha) and the per-prime data of the random
// Euler product eta_m(sigma, X) = sum_p Li_{m+1}(p^{-sigma} X(p)) / (log p)^m.

#include "arith.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace etadist {

struct ModelPoint {
    double sigma = 0.75;
    int m = 0;
    double alpha = 0;
};

// Admissible parameters: sigma > 1/2 with m >= 0, or sigma >= 1/2 with m >= 1.
inline bool admissible(double sigma, int m)
{
    if (!std::isfinite(sigma) || m < 0)
        return false;
    return (sigma > 0.5) || (sigma >= 0.5 && m >= 1);
}

inline void validate(const ModelPoint& mp)
{
    if (!admissible(mp.sigma, mp.m))
        throw ParameterError("(sigma, m) = (" + std::to_string(mp.sigma) + ", " + std::to_string(mp.m) +
                             ") is not admissible: need sigma > 1/2, or sigma >= 1/2 with m >= 1");
    if (!std::isfinite(mp.alpha))
        throw ParameterError("alpha must be finite");
}

// Weight 1/(k p^{k sigma} (k log p)^m) of the prime power p^k.
inline double prime_power_weight(const PrimePower& pp, double sigma, int m)
{
    return std::exp(-sigma * pp.log_n) / (pp.k * std::pow(pp.log_n, m));
}

// Per-prime coefficients c_k = p^{-k sigma} / (k (k log p)^m), so that the
// local factor is sum_k c_k X^k, together with suffix sums used by the
// tail approximations. Primes come from a table; beyond its cutoff the
// sums are continued by an integral against the density of primes.
class ModelContext {
  public:
    ModelContext(double sigma, int m, const PrimePowerTable& table)
        : sigma_(sigma), m_(m), cutoff_(table.cutoff_y)
    {
        validate(ModelPoint{sigma, m, 0});
        std::size_t n = table.primes.size();
        primes_ = table.primes;
        offset_.reserve(n + 1);
        c1_.resize(n);
        c2_.resize(n);
        sum_c_.resize(n);
        sum_kc_.resize(n);
        sum_k2c_.resize(n);
        s2_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            offset_.push_back(coef_.size());
            double lp = std::log(double(primes_[i]));
            double r = std::pow(double(primes_[i]), -sigma);
            double rk = 1;
            double first = 0;
            for (int k = 1; k < 400; ++k) {
                rk *= r;
                double c = rk / (k * std::pow(k * lp, m));
                if (k == 1)
                    first = c;
                else if (c < 1e-18 * first || c < 1e-300)
                    break;
                coef_.push_back(c);
                sum_c_[i] += c;
                sum_kc_[i] += k * c;
                sum_k2c_[i] += double(k) * k * c;
                s2_[i] += c * c;
            }
            c1_[i] = first;
            c2_[i] = coef_.size() - offset_[i] > 1 ? coef_[offset_[i] + 1] : 0.0;
        }
        offset_.push_back(coef_.size());

        // suffix sums, summed from the far end for accuracy
        s2_tail_ = integral_beyond([&](double y) { return second_moment_at(y); });
        suffix_s2_.assign(n + 1, 0);
        suffix_s4_.assign(n + 1, 0);
        suffix_s3_.assign(n + 1, 0);
        suffix_s2_[n] = s2_tail_;
        for (std::size_t i = n; i-- > 0;) {
            suffix_s2_[i] = suffix_s2_[i + 1] + s2_[i];
            double c = c1_[i];
            suffix_s4_[i] = suffix_s4_[i + 1] + c * c * c * c;
            suffix_s3_[i] = suffix_s3_[i + 1] + c * c * c2_[i];
        }
    }

    double sigma() const { return sigma_; }
    int m() const { return m_; }
    double cutoff() const { return cutoff_; }
    std::size_t size() const { return primes_.size(); }
    std::uint32_t prime(std::size_t i) const { return primes_[i]; }

    const double* coef(std::size_t i) const { return coef_.data() + offset_[i]; }
    std::size_t coef_count(std::size_t i) const { return offset_[i + 1] - offset_[i]; }
    double c1(std::size_t i) const { return c1_[i]; }
    double c2(std::size_t i) const { return c2_[i]; }
    double sum_c(std::size_t i) const { return sum_c_[i]; }
    double sum_kc(std::size_t i) const { return sum_kc_[i]; }
    double sum_k2c(std::size_t i) const { return sum_k2c_[i]; }
    // E|eta_p|^2 = Li_{2m+2}(p^{-2 sigma}) / (log p)^{2m}
    double second_moment(std::size_t i) const { return s2_[i]; }

    // Sums over primes with index >= i, the second-moment one including
    // primes beyond the table.
    double suffix_second_moment(std::size_t i) const { return suffix_s2_[i]; }
    double suffix_c1_fourth(std::size_t i) const { return suffix_s4_[i]; }
    double suffix_c1sq_c2(std::size_t i) const { return suffix_s3_[i]; }
    double second_moment_beyond_table() const { return s2_tail_; }

    // First index whose c1 is <= x (c1 decreases with p).
    std::size_t first_index_c1_below(double x) const
    {
        std::size_t lo = 0, hi = c1_.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (c1_[mid] <= x)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    // Continuous stand-ins for a prime y beyond the table.
    double c1_at(double y) const { return std::pow(y, -sigma_) / std::pow(std::log(y), m_); }
    double c2_at(double y) const { return std::pow(y, -2 * sigma_) / (2 * std::pow(2 * std::log(y), m_)); }
    double second_moment_at(double y) const
    {
        double r2 = std::pow(y, -2 * sigma_);
        return polylog(2 * m_ + 2, r2).real() / std::pow(std::log(y), 2 * m_);
    }

    // int_Y^inf h(y) dR(y) with R(y) = li(y) - li(sqrt y)/2 the smooth prime
    // counting approximation, Y the table cutoff.
    template<class H>
    double integral_beyond(H&& h, double rel_tol = 1e-10) const
    {
        double v0 = std::log(std::max(cutoff_, 3.0));
        auto f = [&](double v) {
            double y = std::exp(v);
            if (!std::isfinite(y))
                return 0.0;
            double dens = (1 - 0.5 * std::exp(-0.5 * v)) / v;
            return h(y) * dens * y;
        };
        return integrate_to_infinity(f, v0, 1e-300, rel_tol).value;
    }

    // pi(Y) - R(Y) at the table cutoff, a scale for the error of replacing
    // the prime sum beyond the table by the integral.
    double prime_count_discrepancy() const
    {
        double y = std::max(cutoff_, 3.0);
        auto li = [](double x) {
            // li(x) = gamma + log log x + sum (log x)^k / (k k!)
            double lx = std::log(x), s = 0, t = 1;
            for (int k = 1; k < 400; ++k) {
                t *= lx / k;
                s += t / k;
                if (t / k < 1e-17 * s)
                    break;
            }
            return 0.57721566490153286 + std::log(lx) + s;
        };
        return double(primes_.size()) - (li(y) - 0.5 * li(std::sqrt(y)));
    }

  private:
    double sigma_;
    int m_;
    double cutoff_;
    std::vector<std::uint32_t> primes_;
    std::vector<std::size_t> offset_;
    std::vector<double> coef_;
    std::vector<double> c1_, c2_, sum_c_, sum_kc_, sum_k2c_, s2_;
    std::vector<double> suffix_s2_, suffix_s4_, suffix_s3_;
    double s2_tail_ = 0;
};

inline constexpr std::int64_t default_table_cutoff = 10000000;

// Shared prime table for a cutoff, built once.
inline std::shared_ptr<const PrimePowerTable> shared_table(std::int64_t cutoff = default_table_cutoff)
{
    static std::mutex lock;
    static std::map<std::int64_t, std::shared_ptr<const PrimePowerTable>> cache;
    std::lock_guard<std::mutex> g(lock);
    auto& slot = cache[cutoff];
    if (!slot)
        slot = std::make_shared<const PrimePowerTable>(sieve(cutoff));
    return slot;
}

// Shared model context for (sigma, m) over the table with the given cutoff.
inline std::shared_ptr<const ModelContext> shared_context(double sigma, int m,
                                                          std::int64_t cutoff = default_table_cutoff)
{
    auto table = shared_table(cutoff);
    static std::mutex lock;
    static std::map<std::tuple<double, int, std::int64_t>, std::shared_ptr<const ModelContext>> cache;
    std::lock_guard<std::mutex> g(lock);
    auto& slot = cache[{sigma, m, cutoff}];
    if (!slot)
        slot = std::make_shared<const ModelContext>(sigma, m, *table);
    return slot;
}

} // namespace etadist
