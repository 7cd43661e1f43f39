#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "sasma/error.hpp"
#include "sasma/rng.hpp"

namespace sasma {

/// Stable law S_alpha(scale, beta, 0); characteristic function of the
/// symmetric case is exp(-scale^alpha |theta|^alpha).
struct StableLaw {
    double alpha = 2.0;
    double beta = 0.0;
    double scale = 1.0;

    StableLaw() = default;
    StableLaw(double alpha_, double beta_, double scale_) : alpha(alpha_), beta(beta_), scale(scale_) {
        validate();
    }

    static StableLaw symmetric(double alpha, double scale = 1.0) { return {alpha, 0.0, scale}; }

    void validate() const {
        detail::require_domain(alpha > 0.0 && alpha <= 2.0,
                               "stable law: alpha must lie in (0, 2], got " + std::to_string(alpha));
        detail::require_domain(beta >= -1.0 && beta <= 1.0,
                               "stable law: beta must lie in [-1, 1], got " + std::to_string(beta));
        detail::require_domain(scale >= 0.0 && std::isfinite(scale),
                               "stable law: scale must be finite and >= 0, got " + std::to_string(scale));
        detail::require_domain(alpha < 2.0 || beta == 0.0,
                               "stable law: beta must be 0 when alpha = 2");
    }
};

namespace detail {

// Chambers-Mallows-Stuck for S_alpha(1, 0, 0); v uniform on (-pi/2, pi/2), w ~ Exp(1).
inline double cms_symmetric(double alpha, double v, double w) {
    if (alpha == 1.0) return std::tan(v);
    if (alpha == 2.0) return 2.0 * std::sqrt(w) * std::sin(v);
    const double cv = std::cos(v);
    return std::sin(alpha * v) / std::pow(cv, 1.0 / alpha) *
           std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

// Chambers-Mallows-Stuck for S_alpha(1, beta, 0), beta != 0.
inline double cms_skewed(double alpha, double beta, double v, double w) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (alpha == 1.0) {
        const double a = half_pi + beta * v;
        return (a * std::tan(v) - beta * std::log(half_pi * w * std::cos(v) / a)) / half_pi;
    }
    const double t = beta * std::tan(half_pi * alpha);
    const double b = std::atan(t) / alpha;
    const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
    return s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
}

inline void draw_cms_pair(RngStream& rng, double& v, double& w) {
    v = std::numbers::pi * (rng.uniform_open() - 0.5);
    w = rng.exponential();
}

}  // namespace detail

/// iid draws from S_alpha(scale, 0, 0).
///
/// Each draw consumes one uniform and one exponential variate from the
/// stream; the unit draw is multiplied by the scale last, so draws at scale
/// s are exactly s times the draws at scale 1 under the same stream.
inline std::vector<double> sample_sas(const StableLaw& law, std::size_t count, RngStream& rng) {
    law.validate();
    detail::require_domain(law.beta == 0.0, "sample_sas: law must be symmetric (beta = 0)");
    detail::require_domain(count >= 1, "sample_sas: count must be positive");
    std::vector<double> out(count);
    for (auto& x : out) {
        double v, w;
        detail::draw_cms_pair(rng, v, w);
        x = law.scale * detail::cms_symmetric(law.alpha, v, w);
    }
    return out;
}

/// iid draws from S_alpha(scale, beta, 0). For beta = 0 the draws coincide
/// with sample_sas under the same stream.
inline std::vector<double> sample_skewed_stable(const StableLaw& law, std::size_t count, RngStream& rng) {
    law.validate();
    if (law.beta == 0.0) return sample_sas(law, count, rng);
    detail::require_domain(count >= 1, "sample_skewed_stable: count must be positive");
    const double sigma = law.scale;
    // alpha = 1 is not scale-closed: S_1(s, b, 0) = s X + (2/pi) b s log s.
    const double shift =
        (law.alpha == 1.0 && sigma > 0.0) ? 2.0 / std::numbers::pi * law.beta * sigma * std::log(sigma) : 0.0;
    std::vector<double> out(count);
    for (auto& x : out) {
        double v, w;
        detail::draw_cms_pair(rng, v, w);
        x = sigma * detail::cms_skewed(law.alpha, law.beta, v, w) + shift;
    }
    return out;
}

/// Cumulative distribution function of S_alpha(1, 0, 0).
///
/// alpha = 1 and alpha = 2 use closed forms; otherwise Zolotarev's integral
/// representation over (0, pi/2) is integrated by adaptive Gauss-Kronrod.
inline double sas_cdf(double x, double alpha) {
    detail::require_domain(alpha > 0.0 && alpha <= 2.0, "sas_cdf: alpha must lie in (0, 2]");
    if (x == 0.0) return 0.5;
    if (x < 0.0) return 1.0 - sas_cdf(-x, alpha);
    if (alpha == 2.0) return 0.5 * std::erfc(-x / 2.0);
    if (alpha == 1.0) return 0.5 + std::atan(x) / std::numbers::pi;

    const double a = alpha / (alpha - 1.0);
    const double log_x = std::log(x);
    auto integrand = [&](double theta) {
        const double c = std::cos(theta);
        const double s = std::sin(alpha * theta);
        if (c <= 0.0 || s <= 0.0) return alpha > 1.0 ? (c <= 0.0 ? 1.0 : 0.0) : (c <= 0.0 ? 0.0 : 1.0);
        const double log_v = a * (std::log(c) - std::log(s)) + std::log(std::cos((alpha - 1.0) * theta)) - std::log(c);
        const double e = a * log_x + log_v;
        if (e > 709.0) return 0.0;
        return std::exp(-std::exp(e));
    };
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, std::numbers::pi / 2.0, 12, 1e-11, &err);
    const double tail = integral / std::numbers::pi;
    return alpha < 1.0 ? 0.5 + tail : 1.0 - tail;
}

/// Upper quartile x_{3/4} of S_alpha(1, 0, 0); the lower quartile is its negative.
inline double stable_quartile(double alpha) {
    detail::require_domain(alpha > 0.0 && alpha <= 2.0,
                           "stable_quartile: alpha must lie in (0, 2], got " + std::to_string(alpha));
    if (alpha == 1.0) return 1.0;
    // Near alpha = 1 the integral representation degenerates; the quartile is
    // within 2e-7 of the Cauchy value there.
    if (std::abs(alpha - 1.0) < 1e-6) return 1.0;

    static std::mutex cache_mutex;
    static std::map<double, double> cache;
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(alpha); it != cache.end()) return it->second;
    }

    auto f = [alpha](double x) { return sas_cdf(x, alpha) - 0.75; };
    double lo = 0.25;
    double hi = 2.0;
    while (f(lo) > 0.0) lo *= 0.5;
    while (f(hi) < 0.0) hi *= 2.0;
    boost::uintmax_t iters = 200;
    const auto [left, right] =
        boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(40), iters);
    const double q = 0.5 * (left + right);
    std::lock_guard lock(cache_mutex);
    cache.emplace(alpha, q);
    return q;
}

}  // namespace sasma
