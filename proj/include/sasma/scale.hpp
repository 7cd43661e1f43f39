#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sasma/error.hpp"
#include "sasma/stable.hpp"

namespace sasma {

/// c(p, alpha) with sigma^p = c(p, alpha) E|X|^p for X ~ S_alpha(sigma, 0, 0), 0 < p < alpha.
inline double c_moment(double p, double alpha) {
    detail::require_domain(alpha > 0.0 && alpha <= 2.0, "c_moment: alpha must lie in (0, 2]");
    detail::require_domain(p > 0.0, "c_moment: p must be positive");
    detail::require_domain(p < alpha, "c_moment: p must be below alpha (E|X|^p is infinite for p >= alpha)");
    if (p == 1.0) return std::numbers::pi / (2.0 * std::tgamma(1.0 - 1.0 / alpha));
    return std::tgamma(2.0 - p) * std::cos(std::numbers::pi * p / 2.0) / ((1.0 - p) * std::tgamma(1.0 - p / alpha));
}

/// Linearly interpolated empirical quantile: position q (n - 1) in the
/// sorted sample.
inline double empirical_quantile(std::vector<double> data, double q) {
    detail::require_domain(!data.empty(), "empirical_quantile: empty sample");
    detail::require_domain(q >= 0.0 && q <= 1.0, "empirical_quantile: q must lie in [0, 1]");
    const double pos = q * static_cast<double>(data.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, data.size() - 1);
    std::nth_element(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(lo), data.end());
    const double a = data[lo];
    if (hi == lo) return a;
    const double b = *std::min_element(data.begin() + static_cast<std::ptrdiff_t>(lo) + 1, data.end());
    return a + (pos - static_cast<double>(lo)) * (b - a);
}

struct ScaleEstimate {
    double value = 0.0;
    /// Set when the sample carries no scale information (all zero or constant).
    bool degenerate = false;
};

/// Moment estimator (c(p, alpha) mean |X|^p)^{1/p}.
inline ScaleEstimate scale_moment(std::span<const double> data, double alpha, double p) {
    detail::require_domain(!data.empty(), "scale_moment: empty sample");
    const double c = c_moment(p, alpha);
    double sum = 0.0;
    for (double x : data) sum += std::pow(std::abs(x), p);
    const double mean = sum / static_cast<double>(data.size());
    return {std::pow(c * mean, 1.0 / p), mean == 0.0};
}

/// Quartile estimator (x~_{3/4} - x~_{1/4}) / (x_{3/4} - x_{1/4}) with the
/// theoretical quartiles of S_alpha(1, 0, 0).
inline ScaleEstimate scale_quantile(std::span<const double> data, double alpha) {
    detail::require_domain(data.size() >= 4, "scale_quantile: need at least 4 observations");
    std::vector<double> v(data.begin(), data.end());
    const double q75 = empirical_quantile(v, 0.75);
    const double q25 = empirical_quantile(std::move(v), 0.25);
    const double iqr = q75 - q25;
    return {iqr / (2.0 * stable_quartile(alpha)), !(iqr > 0.0)};
}

enum class ScaleEstimatorKind { quantile, moment, quantile_lowfreq, moment_lowfreq };

inline std::string to_string(ScaleEstimatorKind kind) {
    switch (kind) {
        case ScaleEstimatorKind::quantile: return "quantile";
        case ScaleEstimatorKind::moment: return "moment";
        case ScaleEstimatorKind::quantile_lowfreq: return "quantile_lowfreq";
        case ScaleEstimatorKind::moment_lowfreq: return "moment_lowfreq";
    }
    return "unknown";
}

inline ScaleEstimatorKind scale_estimator_from_string(const std::string& name) {
    if (name == "quantile") return ScaleEstimatorKind::quantile;
    if (name == "moment") return ScaleEstimatorKind::moment;
    if (name == "quantile_lowfreq") return ScaleEstimatorKind::quantile_lowfreq;
    if (name == "moment_lowfreq") return ScaleEstimatorKind::moment_lowfreq;
    throw ConfigError("unknown scale estimator '" + name + "'");
}

/// Every `stride`-th observation, starting at index stride - 1 (the
/// observations X(j T) when stride = T / delta).
inline std::vector<double> low_frequency_subsample(std::span<const double> data, std::size_t stride) {
    detail::require_domain(stride >= 1, "low-frequency subsample: stride must be >= 1");
    std::vector<double> out;
    for (std::size_t i = stride - 1; i < data.size(); i += stride) out.push_back(data[i]);
    return out;
}

}  // namespace sasma
