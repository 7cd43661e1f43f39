#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "sasma/error.hpp"
#include "sasma/rng.hpp"

namespace sasma {

/// Normalising constant C_alpha of the Gaussian-multiplier LePage series,
/// (E|Z|^alpha * int_0^inf x^{-alpha} sin x dx)^{-1}, for 0 < alpha < 2.
inline double lepage_constant(double alpha) {
    detail::require_domain(alpha > 0.0 && alpha < 2.0, "lepage_constant: alpha must lie in (0, 2)");
    if (alpha == 1.0) return std::sqrt(2.0 / std::numbers::pi);
    return (1.0 - alpha) * std::sqrt(std::numbers::pi) /
           (std::pow(2.0, alpha / 2.0) * std::tgamma((alpha + 1.0) / 2.0) * std::tgamma(2.0 - alpha) *
            std::cos(std::numbers::pi * alpha / 2.0));
}

struct LePageResult {
    std::vector<double> values;
    /// Size of the last retained term relative to the largest partial sum.
    double tail_ratio = 0.0;
    bool tail_warning = false;
};

/// Truncated LePage series for the SaS integrals X_t = int f_t(x) Lambda(dx)
/// over [domain_lo, domain_lo + domain_length] with Lebesgue control measure.
///
/// `section(i, x)` evaluates f_{t_i}(x) for i < sections. Locations are drawn
/// uniformly on the domain, so each term carries the factor
/// domain_length^{1/alpha}. A warning is raised when the last retained term
/// exceeds `warn_ratio` times the largest partial sum.
template <class Section>
LePageResult lepage_stable_integral(double alpha, std::size_t sections, Section&& section, double domain_lo,
                                    double domain_length, std::size_t truncation_k, RngStream& rng,
                                    double warn_ratio = 0.05) {
    detail::require_domain(truncation_k >= 1, "lepage_stable_integral: truncation K must be >= 1");
    detail::require_domain(domain_length > 0.0, "lepage_stable_integral: domain length must be positive");
    const double factor = std::pow(lepage_constant(alpha) * domain_length, 1.0 / alpha);

    LePageResult out;
    out.values.assign(sections, 0.0);
    double arrival = 0.0;
    double weight = 0.0;
    double max_section = 0.0;
    for (std::size_t k = 0; k < truncation_k; ++k) {
        arrival += rng.exponential();
        const double x = domain_lo + domain_length * rng.uniform_open();
        const double z = rng.normal();
        weight = std::pow(arrival, -1.0 / alpha);
        for (std::size_t i = 0; i < sections; ++i) {
            const double f = section(i, x);
            max_section = std::max(max_section, std::abs(f));
            out.values[i] += weight * f * z;
        }
    }
    double largest = 0.0;
    for (auto& v : out.values) {
        v *= factor;
        largest = std::max(largest, std::abs(v));
    }
    const double last_term = factor * weight * max_section;
    out.tail_ratio = largest > 0.0 ? last_term / largest : 0.0;
    out.tail_warning = out.tail_ratio > warn_ratio;
    return out;
}

}  // namespace sasma
