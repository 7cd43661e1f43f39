#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sasma/error.hpp"
#include "sasma/scale.hpp"
#include "sasma/simulate.hpp"
#include "sasma/spectral.hpp"

namespace sasma {

/// Settings for the kernel, norm and scale estimators.
struct EstimatorConfig {
    /// Frequency cutoff a_n: the integral runs over [-a_n, a_n].
    double a_n = 20.0;
    /// Initial number of trapezoid subintervals on [-a_n, a_n] (even).
    std::size_t lambda_points = 4096;
    /// The grid is doubled until the sup-norm change of g~ drops below
    /// refine_tol or the subinterval count would exceed max_lambda_points.
    bool refine = true;
    double refine_tol = 1e-4;
    std::size_t max_lambda_points = std::size_t{1} << 16;
    /// Subintervals per axis for the two-dimensional estimator.
    std::size_t lambda_points_2d = 128;
    /// Output abscissae, sorted and symmetric about 0.
    std::vector<double> t_grid = uniform_t_grid(1.5, 301);
    /// Assumed stability index.
    double alpha = 1.7;
    /// Moment order for the moment estimators; 0 selects alpha / 2.
    double p = 0.0;
    /// Cutoff T (compact support) or b_n for the alpha-norm of g~.
    double norm_bound = 1.0;
    ScaleEstimatorKind scale = ScaleEstimatorKind::quantile;
    /// Support radius T used by the low-frequency scale estimators.
    double support_radius = 0.0;
    /// If set, f~ = known_norm2 * g~ and no scale is estimated.
    std::optional<double> known_norm2;

    double moment_order() const { return p > 0.0 ? p : alpha / 2.0; }

    static std::vector<double> uniform_t_grid(double half_range, std::size_t points) {
        detail::require_domain(half_range > 0.0 && points >= 2, "t grid: need half_range > 0 and >= 2 points");
        std::vector<double> t(points);
        const double step = 2.0 * half_range / static_cast<double>(points - 1);
        for (std::size_t i = 0; i < points; ++i) {
            // Fill both ends from the same magnitude so the grid is exactly symmetric.
            const std::size_t k = std::min(i, points - 1 - i);
            const double mag = half_range - step * static_cast<double>(k);
            t[i] = i < points - 1 - i ? -mag : (i == points - 1 - i ? 0.0 : mag);
        }
        return t;
    }

    void validate() const {
        detail::require_domain(a_n > 0.0 && std::isfinite(a_n), "estimator: a_n must be positive");
        detail::require_domain(lambda_points >= 64 && lambda_points % 2 == 0,
                               "estimator: lambda_points must be even and >= 64");
        detail::require_domain(max_lambda_points >= lambda_points, "estimator: max_lambda_points below lambda_points");
        detail::require_domain(lambda_points_2d >= 8 && lambda_points_2d % 2 == 0,
                               "estimator: lambda_points_2d must be even and >= 8");
        detail::require_domain(refine_tol > 0.0, "estimator: refine_tol must be positive");
        detail::require_domain(alpha > 0.0 && alpha <= 2.0, "estimator: alpha must lie in (0, 2]");
        detail::require_domain(moment_order() < alpha, "estimator: moment order p must be below alpha");
        detail::require_domain(norm_bound > 0.0, "estimator: norm bound must be positive");
        detail::require_domain(!t_grid.empty(), "estimator: empty t grid");
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            detail::require_domain(std::isfinite(t_grid[i]), "estimator: non-finite t grid value");
            if (i > 0) detail::require_domain(t_grid[i] > t_grid[i - 1], "estimator: t grid must be increasing");
            const double mirror = t_grid[t_grid.size() - 1 - i];
            detail::require_domain(std::abs(t_grid[i] + mirror) <= 1e-12 * (1.0 + std::abs(mirror)),
                                   "estimator: t grid must be symmetric about 0");
        }
        if (scale == ScaleEstimatorKind::quantile_lowfreq || scale == ScaleEstimatorKind::moment_lowfreq)
            detail::require_domain(support_radius > 0.0,
                                   "estimator: low-frequency scale estimators need the support radius T");
        if (known_norm2) detail::require_domain(*known_norm2 >= 0.0, "estimator: known norm must be >= 0");
    }

    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << "a_n=" << a_n << " lambda_points=" << lambda_points << " refine=" << (refine ? 1 : 0)
           << " refine_tol=" << refine_tol << " alpha=" << alpha << " p=" << moment_order()
           << " norm_bound=" << norm_bound << " scale=" << to_string(scale);
        if (known_norm2) os << " known_norm2=" << *known_norm2;
        return os.str();
    }
};

/// g~ (and optionally f~) on a one-dimensional t grid.
struct KernelEstimate {
    std::vector<double> t_grid;
    /// f~ when a norm is attached, g~ otherwise.
    std::vector<double> values;
    std::vector<double> g_values;
    std::optional<double> norm2;
    std::optional<double> scale;
    std::optional<double> norm_alpha;
    /// Final trapezoid subinterval count on [-a_n, a_n].
    std::size_t lambda_points = 0;
    std::vector<std::string> warnings;
    std::string provenance;
};

struct KernelEstimate2D {
    std::vector<double> t_grid;
    /// Row-major |t_grid| x |t_grid| values of g~(t1, t2).
    std::vector<double> values;
    std::vector<std::string> warnings;
    std::string provenance;

    double at(std::size_t i1, std::size_t i2) const { return values[i1 * t_grid.size() + i2]; }
};

/// (1/pi) int_0^a s(lambda) cos(t lambda) d lambda by the trapezoid rule,
/// with s sampled at lambda_k = k h, k = 0..K.
inline std::vector<double> invert_spectrum_1d(std::span<const double> amplitude, double h,
                                              std::span<const double> t_grid) {
    detail::require_domain(amplitude.size() >= 2 && h > 0.0, "invert_spectrum_1d: need >= 2 nodes and h > 0");
    const std::size_t last = amplitude.size() - 1;
    std::vector<double> g(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = std::abs(t_grid[i]);
        detail::CompensatedSum acc;
        acc.add(0.5 * amplitude[0]);
        for (std::size_t k = 1; k < last; ++k) acc.add(amplitude[k] * std::cos(t * (h * static_cast<double>(k))));
        acc.add(0.5 * amplitude[last] * std::cos(t * (h * static_cast<double>(last))));
        g[i] = acc.value() * h / std::numbers::pi;
    }
    return g;
}

/// (2 pi)^-2 times the tensor trapezoid integral of s(lambda) e^{i <t, lambda>}
/// over [-a, a]^2, for s jointly even. `amplitude` is row-major on the
/// nodes `lambdas` x `lambdas`. Returns |t_grid|^2 values, row-major.
inline std::vector<double> invert_spectrum_2d(std::span<const double> amplitude, std::span<const double> lambdas,
                                              std::span<const double> t_grid) {
    const std::size_t L = lambdas.size();
    detail::require_domain(L >= 2 && amplitude.size() == L * L, "invert_spectrum_2d: amplitude must be L x L");
    const std::size_t nt = t_grid.size();
    const double h = (lambdas.back() - lambdas.front()) / static_cast<double>(L - 1);
    // Trapezoid-weighted cosine and sine tables, nt x L.
    std::vector<double> cw(nt * L), sw(nt * L);
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t k = 0; k < L; ++k) {
            const double w = (k == 0 || k == L - 1) ? 0.5 * h : h;
            const double arg = t_grid[i] * lambdas[k];
            cw[i * L + k] = w * std::cos(arg);
            sw[i * L + k] = w * std::sin(arg);
        }
    // Real part of sum s e^{i(t1 l1 + t2 l2)} = C1 S C2^T - S1 S S2^T.
    std::vector<double> cs(nt * L, 0.0), ss(nt * L, 0.0);
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t k1 = 0; k1 < L; ++k1) {
            const double c = cw[i * L + k1];
            const double s = sw[i * L + k1];
            const double* row = &amplitude[k1 * L];
            double* crow = &cs[i * L];
            double* srow = &ss[i * L];
            for (std::size_t k2 = 0; k2 < L; ++k2) {
                crow[k2] += c * row[k2];
                srow[k2] += s * row[k2];
            }
        }
    const double norm = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
    std::vector<double> g(nt * nt);
    for (std::size_t i1 = 0; i1 < nt; ++i1)
        for (std::size_t i2 = 0; i2 < nt; ++i2) {
            double acc = 0.0;
            for (std::size_t k2 = 0; k2 < L; ++k2)
                acc += cs[i1 * L + k2] * cw[i2 * L + k2] - ss[i1 * L + k2] * sw[i2 * L + k2];
            g[i1 * nt + i2] = acc * norm;
        }
    return g;
}

namespace detail {

inline double clamped_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

/// g~(t) = (1/pi) int_0^{a_n} sqrt(delta I^s(lambda)) cos(t lambda) d lambda on config.t_grid.
inline KernelEstimate estimate_g(const SampledPath& path, const SmoothingFilter& filter,
                                 const EstimatorConfig& config) {
    config.validate();
    const Periodogram pg(path);
    const double delta = path.delta();
    auto amplitude_at = [&](double lambda) { return detail::clamped_sqrt(delta * pg.smoothed(lambda, filter)); };

    std::size_t intervals = config.lambda_points;
    std::size_t half = intervals / 2;
    double h = 2.0 * config.a_n / static_cast<double>(intervals);
    std::vector<double> amp(half + 1);
    for (std::size_t k = 0; k <= half; ++k) amp[k] = amplitude_at(h * static_cast<double>(k));
    std::vector<double> g = invert_spectrum_1d(amp, h, config.t_grid);

    KernelEstimate est;
    bool converged = !config.refine;
    while (!converged && 2 * intervals <= config.max_lambda_points) {
        // Nested refinement: old nodes become the even nodes of the new grid.
        const std::size_t next_half = 2 * half;
        const double next_h = h / 2.0;
        std::vector<double> next(next_half + 1);
        for (std::size_t k = 0; k <= half; ++k) next[2 * k] = amp[k];
        for (std::size_t k = 1; k < next_half; k += 2) next[k] = amplitude_at(next_h * static_cast<double>(k));
        std::vector<double> g_next = invert_spectrum_1d(next, next_h, config.t_grid);
        double change = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) change = std::max(change, std::abs(g_next[i] - g[i]));
        amp = std::move(next);
        g = std::move(g_next);
        h = next_h;
        half = next_half;
        intervals *= 2;
        converged = change < config.refine_tol;
    }
    if (!converged) {
        std::ostringstream os;
        os << "lambda quadrature did not reach sup-norm change < " << config.refine_tol << " within "
           << config.max_lambda_points << " subintervals";
        est.warnings.push_back(os.str());
    }
    const double t_max = detail::max_abs(config.t_grid);
    if (t_max > 0.0) {
        const double per_oscillation = (2.0 * std::numbers::pi / t_max) / h;
        if (per_oscillation < 8.0) {
            std::ostringstream os;
            os << "lambda quadrature under-resolved: " << per_oscillation
               << " points per oscillation of cos(t lambda) at |t| = " << t_max << " (need >= 8)";
            est.warnings.push_back(os.str());
        }
    }
    est.t_grid = config.t_grid;
    est.g_values = g;
    est.values = std::move(g);
    est.lambda_points = intervals;
    est.provenance = config.describe() + " kernel=" + path.meta().kernel_id +
                     " seed=" + std::to_string(path.meta().seed) + " stream=" + std::to_string(path.meta().stream_id);
    return est;
}

/// (int_{-bound}^{bound} |g~(t)|^alpha dt)^{1/alpha} by the trapezoid rule
/// on the estimate grid, with linear interpolation at +-bound.
inline double norm_alpha_g(std::span<const double> t, std::span<const double> values, double alpha, double bound) {
    detail::require_domain(t.size() == values.size() && t.size() >= 2, "norm_alpha_g: grid/value size mismatch");
    detail::require_domain(alpha > 0.0 && alpha <= 2.0, "norm_alpha_g: alpha must lie in (0, 2]");
    detail::require_domain(bound > 0.0, "norm_alpha_g: bound must be positive");
    const double slack = 1e-9 * std::max(1.0, bound);
    if (t.front() > -bound + slack || t.back() < bound - slack)
        throw DomainError("norm_alpha_g: estimate grid [" + std::to_string(t.front()) + ", " +
                          std::to_string(t.back()) + "] does not cover [-bound, bound] with bound = " +
                          std::to_string(bound));
    auto value_at = [&](double x) {
        auto it = std::lower_bound(t.begin(), t.end(), x);
        if (it == t.begin()) return values.front();
        if (it == t.end()) return values.back();
        const std::size_t i = static_cast<std::size_t>(it - t.begin());
        const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
        return values[i - 1] + w * (values[i] - values[i - 1]);
    };
    // Knots: -bound, interior grid points, +bound.
    std::vector<double> xs{-bound};
    std::vector<double> ys{value_at(-bound)};
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] > -bound + slack && t[i] < bound - slack) {
            xs.push_back(t[i]);
            ys.push_back(values[i]);
        }
    xs.push_back(bound);
    ys.push_back(value_at(bound));
    double integral = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        integral += 0.5 * (xs[i] - xs[i - 1]) * (std::pow(std::abs(ys[i]), alpha) + std::pow(std::abs(ys[i - 1]), alpha));
    return std::pow(integral, 1.0 / alpha);
}

inline double norm_alpha_g(const KernelEstimate& estimate, double alpha, double bound) {
    return norm_alpha_g(estimate.t_grid, estimate.g_values.empty() ? estimate.values : estimate.g_values, alpha,
                        bound);
}

/// Scale estimate of X(0) from the path with the configured estimator.
inline ScaleEstimate estimate_scale(const SampledPath& path, const EstimatorConfig& config) {
    switch (config.scale) {
        case ScaleEstimatorKind::quantile: return scale_quantile(path.values(), config.alpha);
        case ScaleEstimatorKind::moment: return scale_moment(path.values(), config.alpha, config.moment_order());
        case ScaleEstimatorKind::quantile_lowfreq:
        case ScaleEstimatorKind::moment_lowfreq: {
            const auto stride =
                static_cast<std::size_t>(std::max(1.0, std::round(config.support_radius / path.delta())));
            const auto sub = low_frequency_subsample(path.values(), stride);
            if (config.scale == ScaleEstimatorKind::quantile_lowfreq) {
                if (sub.size() < 4)
                    throw DomainError("low-frequency quantile scale: fewer than 4 observations at spacing T");
                return scale_quantile(sub, config.alpha);
            }
            if (sub.empty()) throw DomainError("low-frequency moment scale: no observations at spacing T");
            return scale_moment(sub, config.alpha, config.moment_order());
        }
    }
    throw ConfigError("unknown scale estimator");
}

/// Plug-in f~ = (sigma~ / ||g~||_alpha) g~; norm2 holds sigma~ / ||g~||_alpha.
inline KernelEstimate estimate_f(const SampledPath& path, const SmoothingFilter& filter,
                                 const EstimatorConfig& config) {
    KernelEstimate est = estimate_g(path, filter, config);
    double factor = 0.0;
    if (config.known_norm2) {
        factor = *config.known_norm2;
    } else {
        const double na = norm_alpha_g(est, config.alpha, config.norm_bound);
        if (!(na > 0.0)) throw NumericError("estimate_f: ||g~||_alpha is zero (degenerate kernel estimate)");
        const ScaleEstimate sc = estimate_scale(path, config);
        if (sc.degenerate) est.warnings.push_back("scale estimate is degenerate (zero spread in the data)");
        est.scale = sc.value;
        est.norm_alpha = na;
        factor = sc.value / na;
    }
    est.norm2 = factor;
    if (factor != 1.0)
        for (auto& v : est.values) v *= factor;
    return est;
}

/// Tensor-product analogue of estimate_g on config.t_grid x config.t_grid
/// with config.lambda_points_2d subintervals per axis.
inline KernelEstimate2D estimate_g_2d(const SampledField& field, const SmoothingFilter& filter,
                                      const EstimatorConfig& config, std::size_t memory_budget = std::size_t{1} << 27) {
    config.validate();
    const std::size_t L = config.lambda_points_2d;
    const std::size_t nodes = L + 1;
    const std::size_t width = 2 * filter.half_width() + 1;
    const std::size_t axis = nodes * width;
    const std::size_t nt = config.t_grid.size();
    const double needed = static_cast<double>(axis) * static_cast<double>(axis) +
                          static_cast<double>(field.n()) * static_cast<double>(axis) * 2.0 +
                          static_cast<double>(nt) * static_cast<double>(nt) + 4.0 * static_cast<double>(nt * nodes);
    if (needed > static_cast<double>(memory_budget))
        throw ResourceError("estimate_g_2d: needs about " + std::to_string(static_cast<long long>(needed)) +
                            " doubles, above the budget of " + std::to_string(memory_budget) +
                            "; reduce lambda_points_2d, the t grid or the filter width");

    const double h = 2.0 * config.a_n / static_cast<double>(L);
    std::vector<double> lambdas(nodes);
    const long half = static_cast<long>(L / 2);
    for (long k = -half; k <= half; ++k) lambdas[static_cast<std::size_t>(k + half)] = h * static_cast<double>(k);

    // Axis frequencies lambda_k + m / (n delta), index k * width + (m + m_n).
    const double shift = 1.0 / (static_cast<double>(field.n()) * field.delta());
    const long mh = static_cast<long>(filter.half_width());
    std::vector<double> freq(axis);
    for (std::size_t k = 0; k < nodes; ++k)
        for (long m = -mh; m <= mh; ++m)
            freq[k * width + static_cast<std::size_t>(m + mh)] = lambdas[k] + static_cast<double>(m) * shift;
    const std::vector<double> raw = periodogram_2d_grid(field, freq, freq);

    const double d2 = field.delta() * field.delta();
    std::vector<double> amp(nodes * nodes);
    for (std::size_t k1 = 0; k1 < nodes; ++k1)
        for (std::size_t k2 = 0; k2 < nodes; ++k2) {
            double s = 0.0;
            for (long m1 = -mh; m1 <= mh; ++m1) {
                const double w1 = filter.weight(m1);
                if (w1 == 0.0) continue;
                const std::size_t row = (k1 * width + static_cast<std::size_t>(m1 + mh)) * axis;
                for (long m2 = -mh; m2 <= mh; ++m2)
                    s += w1 * filter.weight(m2) * raw[row + k2 * width + static_cast<std::size_t>(m2 + mh)];
            }
            amp[k1 * nodes + k2] = detail::clamped_sqrt(d2 * s);
        }

    KernelEstimate2D est;
    est.t_grid = config.t_grid;
    est.values = invert_spectrum_2d(amp, lambdas, config.t_grid);
    const double t_max = detail::max_abs(config.t_grid);
    if (t_max > 0.0 && (2.0 * std::numbers::pi / t_max) / h < 8.0)
        est.warnings.push_back("2D lambda quadrature under-resolved (fewer than 8 points per oscillation)");
    est.provenance = config.describe() + " lambda_points_2d=" + std::to_string(L) +
                     " seed=" + std::to_string(field.meta().seed) +
                     " stream=" + std::to_string(field.meta().stream_id);
    return est;
}

}  // namespace sasma
