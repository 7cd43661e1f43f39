#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sasma/error.hpp"
#include "sasma/simulate.hpp"

namespace sasma {

/// Smoothing weights W(m), |m| <= half_width, stored at index m + half_width.
/// Weights are nonnegative and sum to one.
class SmoothingFilter {
public:
    SmoothingFilter(std::size_t half_width, std::vector<double> weights)
        : half_width_(half_width), weights_(std::move(weights)) {
        detail::require_domain(half_width_ >= 1, "smoothing filter: half width must be >= 1");
        detail::require_domain(weights_.size() == 2 * half_width_ + 1,
                               "smoothing filter: need 2 * half_width + 1 weights");
        double sum = 0.0;
        for (double w : weights_) {
            detail::require_domain(w >= 0.0 && std::isfinite(w), "smoothing filter: weights must be >= 0");
            sum += w;
        }
        detail::require_domain(std::abs(sum - 1.0) <= 1e-12, "smoothing filter: weights must sum to 1");
    }

    static SmoothingFilter uniform(std::size_t half_width) {
        detail::require_domain(half_width >= 1, "uniform filter: half width must be >= 1");
        return {half_width, std::vector<double>(2 * half_width + 1, 1.0 / static_cast<double>(2 * half_width + 1))};
    }

    /// Weights proportional to half_width + 1 - |m|.
    static SmoothingFilter triangular(std::size_t half_width) {
        detail::require_domain(half_width >= 1, "triangular filter: half width must be >= 1");
        const double h = static_cast<double>(half_width);
        std::vector<double> w(2 * half_width + 1);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = h + 1.0 - std::abs(static_cast<double>(i) - h);
        const double total = (h + 1.0) * (h + 1.0);
        for (auto& x : w) x /= total;
        return {half_width, std::move(w)};
    }

    /// Unit weight at m = 0; reproduces the raw periodogram.
    static SmoothingFilter identity(std::size_t half_width = 1) {
        std::vector<double> w(2 * half_width + 1, 0.0);
        w[half_width] = 1.0;
        return {half_width, std::move(w)};
    }

    std::size_t half_width() const noexcept { return half_width_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double weight(long m) const { return weights_[static_cast<std::size_t>(m + static_cast<long>(half_width_))]; }

    /// W* = max_m W(m).
    double max_weight() const { return *std::max_element(weights_.begin(), weights_.end()); }

    /// W^(2) = sum_m m^2 W(m).
    double second_moment() const {
        double s = 0.0;
        const long h = static_cast<long>(half_width_);
        for (long m = -h; m <= h; ++m) s += static_cast<double>(m * m) * weight(m);
        return s;
    }

private:
    std::size_t half_width_;
    std::vector<double> weights_;
};

/// Symmetric frequency grid on [-bound, bound].
struct FrequencyGrid {
    std::vector<double> lambdas;
    double bound = 0.0;

    /// `intervals` equal steps over [-bound, bound] (intervals + 1 nodes).
    static FrequencyGrid uniform(double bound, std::size_t intervals) {
        detail::require_domain(bound > 0.0 && intervals >= 2 && intervals % 2 == 0,
                               "frequency grid: need bound > 0 and an even number of intervals");
        FrequencyGrid g;
        g.bound = bound;
        g.lambdas.resize(intervals + 1);
        const double h = 2.0 * bound / static_cast<double>(intervals);
        const long half = static_cast<long>(intervals / 2);
        for (long k = -half; k <= half; ++k) g.lambdas[static_cast<std::size_t>(k + half)] = h * static_cast<double>(k);
        return g;
    }
};

namespace detail {

// Neumaier-compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Rotation e^{i j delta lambda} is advanced by complex multiplication and
// re-anchored from sincos every `anchor` steps.
inline constexpr std::size_t phase_anchor = 32;

// |sum_{j=1}^{n} x_j e^{i j delta lambda}|^2 with stride access.
inline double fourier_sum_squared(const double* x, std::size_t n, std::size_t stride, double delta, double lambda) {
    CompensatedSum re, im;
    const double theta = delta * lambda;
    const double wr = std::cos(theta);
    const double wi = std::sin(theta);
    double cr = 0.0, ci = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j % phase_anchor == 0) {
            const double arg = (static_cast<double>(j + 1) * delta) * lambda;
            cr = std::cos(arg);
            ci = std::sin(arg);
        } else {
            const double nr = cr * wr - ci * wi;
            ci = cr * wi + ci * wr;
            cr = nr;
        }
        const double v = x[j * stride];
        re.add(v * cr);
        im.add(v * ci);
    }
    const double a = re.value();
    const double b = im.value();
    return a * a + b * b;
}

}  // namespace detail

/// Self-normalised periodogram evaluator for one path; the path must outlive it.
class Periodogram {
public:
    explicit Periodogram(const SampledPath& path) : path_(path) {
        if (!(path.sum_squares() > 0.0))
            throw NumericError("periodogram: path is identically zero (degenerate denominator)");
    }

    /// I(lambda) = |sum_j X_j e^{i t_j lambda}|^2 / sum_j X_j^2, t_j = j delta.
    double raw(double lambda) const {
        return detail::fourier_sum_squared(path_.values().data(), path_.size(), 1, path_.delta(), lambda) /
               path_.sum_squares();
    }

    /// sum_m W(m) I(lambda + m / (n delta)).
    double smoothed(double lambda, const SmoothingFilter& filter) const {
        const double shift = 1.0 / (static_cast<double>(path_.size()) * path_.delta());
        const long h = static_cast<long>(filter.half_width());
        double num = 0.0;
        for (long m = -h; m <= h; ++m) {
            const double w = filter.weight(m);
            if (w == 0.0) continue;
            num += w * detail::fourier_sum_squared(path_.values().data(), path_.size(), 1, path_.delta(),
                                                   lambda + static_cast<double>(m) * shift);
        }
        return num / path_.sum_squares();
    }

    const SampledPath& path() const noexcept { return path_; }

private:
    const SampledPath& path_;
};

inline double self_normalized_periodogram(const SampledPath& path, double lambda) {
    return Periodogram(path).raw(lambda);
}

inline double smoothed_periodogram(const SampledPath& path, double lambda, const SmoothingFilter& filter) {
    return Periodogram(path).smoothed(lambda, filter);
}

/// Two-dimensional self-normalised periodogram with t_j = (j1 delta, j2 delta).
inline double periodogram_2d(const SampledField& field, double lambda1, double lambda2) {
    if (!(field.sum_squares() > 0.0))
        throw NumericError("periodogram_2d: field is identically zero (degenerate denominator)");
    const std::size_t n = field.n();
    const double delta = field.delta();
    // Inner sums over j2 for every row, then the outer sum over j1.
    std::vector<std::complex<double>> rows(n);
    for (std::size_t j1 = 0; j1 < n; ++j1) {
        detail::CompensatedSum re, im;
        for (std::size_t j2 = 0; j2 < n; ++j2) {
            const double arg = (static_cast<double>(j2 + 1) * delta) * lambda2;
            const double v = field.at(j1, j2);
            re.add(v * std::cos(arg));
            im.add(v * std::sin(arg));
        }
        rows[j1] = {re.value(), im.value()};
    }
    detail::CompensatedSum re, im;
    for (std::size_t j1 = 0; j1 < n; ++j1) {
        const double arg = (static_cast<double>(j1 + 1) * delta) * lambda1;
        const std::complex<double> z = rows[j1] * std::complex<double>(std::cos(arg), std::sin(arg));
        re.add(z.real());
        im.add(z.imag());
    }
    const double a = re.value();
    const double b = im.value();
    return (a * a + b * b) / field.sum_squares();
}

/// sum_{m1, m2} W(m1) W(m2) I(lambda1 + m1 / (n delta), lambda2 + m2 / (n delta)).
inline double smoothed_periodogram_2d(const SampledField& field, double lambda1, double lambda2,
                                      const SmoothingFilter& filter) {
    const double shift = 1.0 / (static_cast<double>(field.n()) * field.delta());
    const long h = static_cast<long>(filter.half_width());
    double s = 0.0;
    for (long m1 = -h; m1 <= h; ++m1)
        for (long m2 = -h; m2 <= h; ++m2) {
            const double w = filter.weight(m1) * filter.weight(m2);
            if (w == 0.0) continue;
            s += w * periodogram_2d(field, lambda1 + static_cast<double>(m1) * shift,
                                    lambda2 + static_cast<double>(m2) * shift);
        }
    return s;
}

/// Raw periodogram on the tensor grid u x v (row-major in u), computed with
/// O(n^2 |v| + n |u| |v|) work.
inline std::vector<double> periodogram_2d_grid(const SampledField& field, std::span<const double> u,
                                               std::span<const double> v) {
    if (!(field.sum_squares() > 0.0))
        throw NumericError("periodogram_2d: field is identically zero (degenerate denominator)");
    const std::size_t n = field.n();
    const double delta = field.delta();
    using cplx = std::complex<double>;
    auto phases = [&](std::span<const double> freq) {
        std::vector<cplx> e(n * freq.size());
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t b = 0; b < freq.size(); ++b) {
                const double arg = (static_cast<double>(j + 1) * delta) * freq[b];
                e[j * freq.size() + b] = cplx(std::cos(arg), std::sin(arg));
            }
        return e;
    };
    const std::vector<cplx> ev = phases(v);
    const std::vector<cplx> eu = phases(u);
    const std::size_t nb = v.size();
    const std::size_t na = u.size();

    // inner[j1][b] = sum_j2 X(j1, j2) e^{i j2 delta v_b}
    std::vector<cplx> inner(n * nb, cplx(0.0, 0.0));
    for (std::size_t j1 = 0; j1 < n; ++j1) {
        cplx* out = &inner[j1 * nb];
        for (std::size_t j2 = 0; j2 < n; ++j2) {
            const double x = field.at(j1, j2);
            if (x == 0.0) continue;
            const cplx* e = &ev[j2 * nb];
            for (std::size_t b = 0; b < nb; ++b) out[b] += x * e[b];
        }
    }
    std::vector<double> result(na * nb);
    std::vector<cplx> acc(nb);
    for (std::size_t a = 0; a < na; ++a) {
        std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
        for (std::size_t j1 = 0; j1 < n; ++j1) {
            const cplx e = eu[j1 * na + a];
            const cplx* row = &inner[j1 * nb];
            for (std::size_t b = 0; b < nb; ++b) acc[b] += e * row[b];
        }
        for (std::size_t b = 0; b < nb; ++b) result[a * nb + b] = std::norm(acc[b]) / field.sum_squares();
    }
    return result;
}

}  // namespace sasma
