#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "sasma/error.hpp"
#include "sasma/rng.hpp"

namespace sasma {

/// iid Gamma(shape = cell_measure, rate = 1) increments.
inline std::vector<double> sample_gamma_increment(double cell_measure, std::size_t count, RngStream& rng) {
    detail::require_domain(cell_measure > 0.0 && std::isfinite(cell_measure),
                           "sample_gamma_increment: cell measure must be positive, got " +
                               std::to_string(cell_measure));
    std::gamma_distribution<double> gamma(cell_measure, 1.0);
    std::vector<double> out(count);
    // Small shapes put mass below the smallest double; such draws are
    // reported as the smallest positive subnormal instead of zero.
    constexpr double tiny = std::numeric_limits<double>::denorm_min();
    for (auto& x : out) x = std::max(gamma(rng.engine()), tiny);
    return out;
}

/// Levy density h(x) = c1 |log x| / x^p1 for x > eps, c2 |log(-x)| / |x|^p2
/// for x < -eps, zero on [-eps, eps].
struct LevyDensityParams {
    double c1 = 1.0;
    double c2 = 1.0;
    double p1 = 2.5;
    double p2 = 2.5;
    double eps = 0.01;

    void validate() const {
        detail::require_domain(c1 > 0.0 && c2 > 0.0, "levy density: c1, c2 must be positive");
        detail::require_domain(p1 > 0.0 && p2 > 0.0, "levy density: p1, p2 must be positive");
        // The tail mass of |log x| x^{-p} over (eps, inf) is finite only for p > 1.
        detail::require_domain(p1 > 1.0 && p2 > 1.0,
                               "levy density: p1, p2 must exceed 1 for a finite jump intensity");
        detail::require_domain(eps >= 0.0 && std::isfinite(eps), "levy density: eps must be >= 0");
    }

    double density(double x) const {
        if (x > eps) return c1 * std::abs(std::log(x)) / std::pow(x, p1);
        if (x < -eps) return c2 * std::abs(std::log(-x)) / std::pow(-x, p2);
        return 0.0;
    }
};

namespace detail {

// Antiderivative of y^{-p} log y (p != 1).
inline double log_power_antiderivative(double y, double p) {
    const double q = 1.0 - p;
    return std::pow(y, q) * (std::log(y) / q - 1.0 / (q * q));
}

// Integral of |log y| y^{-p} over (x, inf), x > 0, p > 1.
inline double log_power_tail_mass(double x, double p) {
    const double a1 = log_power_antiderivative(1.0, p);
    if (x >= 1.0) return -log_power_antiderivative(x, p);
    return log_power_antiderivative(x, p) - 2.0 * a1;
}

// Integral of (-log y) y^{1-p} over (lo, 1), 0 < lo < 1.
inline double log_first_moment_below_one(double lo, double p) {
    const double q = 2.0 - p;
    if (std::abs(q) < 1e-12) {
        const double l = std::log(lo);
        return 0.5 * l * l;
    }
    auto anti = [q](double y) { return std::pow(y, q) * (std::log(y) / q - 1.0 / (q * q)); };
    return anti(lo) - anti(1.0);
}

// Inverse-CDF sampler for jump sizes on one half-line, |x| > eps.
class HalfLineJumpSampler {
public:
    static constexpr std::size_t table_size = 2048;

    HalfLineJumpSampler(double amplitude, double exponent, double eps)
        : c_(amplitude), p_(exponent), eps_(eps) {
        log_lo_ = std::log(eps_);
        mass_ = c_ * log_power_tail_mass(eps_, p_);
        // Tabulate the normalised tail mass on a log-spaced grid reaching far
        // enough that the remaining mass is negligible.
        double log_hi = log_lo_ + 1.0;
        while (tail_fraction(log_hi) > 1e-15 && log_hi < log_lo_ + 2000.0) log_hi += 1.0;
        step_ = (log_hi - log_lo_) / static_cast<double>(table_size - 1);
        for (std::size_t i = 0; i < table_size; ++i)
            table_[i] = tail_fraction(log_lo_ + step_ * static_cast<double>(i));
    }

    double mass() const noexcept { return mass_; }

    // Jump magnitude for a uniform u in (0, 1): solves tail_fraction(log x) = u.
    double draw(double u) const {
        // table_ is decreasing from 1 to ~0; locate the bracketing cell.
        auto it = std::lower_bound(table_.begin(), table_.end(), u, [](double a, double b) { return a > b; });
        std::size_t hi = static_cast<std::size_t>(it - table_.begin());
        double lo_log, hi_log;
        if (hi == 0) return eps_;
        if (hi >= table_size) {
            lo_log = log_lo_ + step_ * static_cast<double>(table_size - 1);
            hi_log = lo_log + 1.0;
            while (tail_fraction(hi_log) > u) hi_log += 1.0;
        } else {
            lo_log = log_lo_ + step_ * static_cast<double>(hi - 1);
            hi_log = log_lo_ + step_ * static_cast<double>(hi);
        }
        auto f = [&](double l) { return tail_fraction(l) - u; };
        boost::uintmax_t iters = 100;
        const auto [a, b] =
            boost::math::tools::toms748_solve(f, lo_log, hi_log, boost::math::tools::eps_tolerance<double>(50), iters);
        return std::exp(0.5 * (a + b));
    }

private:
    double tail_fraction(double log_x) const { return c_ * log_power_tail_mass(std::exp(log_x), p_) / mass_; }

    double c_, p_, eps_;
    double log_lo_ = 0.0;
    double step_ = 0.0;
    double mass_ = 0.0;
    std::array<double, table_size> table_{};
};

}  // namespace detail

/// Compound-Poisson increments of the truncated Levy process
///   xi(t) = sum of jumps up to t  -  t * int_{eps<|x|<1} x h(x) dx.
class TruncatedLevySampler {
public:
    explicit TruncatedLevySampler(const LevyDensityParams& params)
        : params_(checked(params)),
          positive_(params_.c1, params_.p1, params_.eps),
          negative_(params_.c2, params_.p2, params_.eps) {
        if (params_.eps < 1.0) {
            drift_rate_ = params_.c1 * detail::log_first_moment_below_one(params_.eps, params_.p1) -
                          params_.c2 * detail::log_first_moment_below_one(params_.eps, params_.p2);
        }
    }

    const LevyDensityParams& params() const noexcept { return params_; }
    double positive_intensity() const noexcept { return positive_.mass(); }
    double negative_intensity() const noexcept { return negative_.mass(); }
    /// Total jump intensity per unit time, int h.
    double total_intensity() const noexcept { return positive_intensity() + negative_intensity(); }
    /// Compensator rate int_{eps<|x|<1} x h(x) dx.
    double drift_rate() const noexcept { return drift_rate_; }

    /// One copy of xi(dt); the number of jumps is written to *jumps when given.
    double draw(double dt, RngStream& rng, std::size_t* jumps = nullptr) const {
        std::poisson_distribution<std::size_t> count(dt * total_intensity());
        const std::size_t k = count(rng.engine());
        const double p_up = positive_intensity() / total_intensity();
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const bool up = rng.uniform_open() < p_up;
            const double u = rng.uniform_open();
            sum += up ? positive_.draw(u) : -negative_.draw(u);
        }
        if (jumps) *jumps = k;
        return sum - dt * drift_rate_;
    }

private:
    static const LevyDensityParams& checked(const LevyDensityParams& params) {
        params.validate();
        if (!(params.eps > 0.0))
            throw DomainError("truncated Levy sampler: eps = 0 gives infinite jump intensity; use eps > 0");
        return params;
    }

    LevyDensityParams params_;
    detail::HalfLineJumpSampler positive_;
    detail::HalfLineJumpSampler negative_;
    double drift_rate_ = 0.0;
};

/// iid copies of xi(dt) for the truncated Levy process.
inline std::vector<double> sample_trunc_levy_increment(const LevyDensityParams& params, double dt,
                                                       std::size_t count, RngStream& rng) {
    detail::require_domain(dt > 0.0 && std::isfinite(dt), "sample_trunc_levy_increment: dt must be positive");
    const TruncatedLevySampler sampler(params);
    std::vector<double> out(count);
    for (auto& x : out) x = sampler.draw(dt, rng);
    return out;
}

}  // namespace sasma
