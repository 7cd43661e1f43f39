#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "sasma/error.hpp"

namespace sasma {

enum class KernelFamily { triangular, spherical, exponential, gaussian2d, tabulated };

inline std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::triangular: return "triangular";
        case KernelFamily::spherical: return "spherical";
        case KernelFamily::exponential: return "exponential";
        case KernelFamily::gaussian2d: return "gaussian2d";
        case KernelFamily::tabulated: return "tabulated";
    }
    return "unknown";
}

inline KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "triangular") return KernelFamily::triangular;
    if (name == "spherical") return KernelFamily::spherical;
    if (name == "exponential") return KernelFamily::exponential;
    if (name == "gaussian2d") return KernelFamily::gaussian2d;
    if (name == "tabulated") return KernelFamily::tabulated;
    throw ConfigError("unknown kernel family '" + name + "'");
}

/// Samples of an even kernel on the symmetric grid -R + i h, i = 0..m-1,
/// with h = 2R / (m - 1). Values are interpolated (bi)linearly. For two
/// dimensions `values` is an m x m row-major array over the same axis.
struct KernelTable {
    double half_width = 0.0;
    std::size_t points = 0;
    std::vector<double> values;

    double step() const { return 2.0 * half_width / static_cast<double>(points - 1); }
    double node(std::size_t i) const { return -half_width + step() * static_cast<double>(i); }
};

/// An even moving-average kernel f = c * shape.
struct KernelSpec {
    KernelFamily family = KernelFamily::triangular;
    double c = 1.0;
    double support_radius = 1.0;
    int dimension = 1;
    std::shared_ptr<const KernelTable> table;

    static KernelSpec triangular(double c = 1.0) { return make(KernelFamily::triangular, c, 1.0, 1); }
    static KernelSpec spherical(double c = 1.0) { return make(KernelFamily::spherical, c, 1.0, 1); }
    static KernelSpec exponential(double c = 1.0) {
        return make(KernelFamily::exponential, c, std::numeric_limits<double>::infinity(), 1);
    }
    /// c * exp(-|t|^2 / 2) / (2 pi) on the plane.
    static KernelSpec gaussian2d(double c = 1.0) {
        return make(KernelFamily::gaussian2d, c, std::numeric_limits<double>::infinity(), 2);
    }

    /// Tabulated kernel on [-half_width, half_width]^dimension; the table must be even.
    static KernelSpec tabulated(std::vector<double> values, double half_width, int dimension = 1, double c = 1.0) {
        detail::require_domain(dimension == 1 || dimension == 2, "tabulated kernel: dimension must be 1 or 2");
        detail::require_domain(half_width > 0.0, "tabulated kernel: half width must be positive");
        auto table = std::make_shared<KernelTable>();
        table->half_width = half_width;
        if (dimension == 1) {
            table->points = values.size();
        } else {
            table->points = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(values.size()))));
            detail::require_domain(table->points * table->points == values.size(),
                                   "tabulated 2D kernel: value count must be a perfect square");
        }
        detail::require_domain(table->points >= 3 && table->points % 2 == 1,
                               "tabulated kernel: need an odd number (>= 3) of nodes per axis");
        table->values = std::move(values);
        const std::size_t total = table->values.size();
        for (std::size_t i = 0; i < total; ++i) {
            detail::require_domain(std::isfinite(table->values[i]), "tabulated kernel: non-finite value");
            detail::require_domain(table->values[i] == table->values[total - 1 - i],
                                   "tabulated kernel: table is not even (f(t) != f(-t))");
        }
        KernelSpec spec;
        spec.family = KernelFamily::tabulated;
        spec.c = c;
        spec.support_radius = half_width;
        spec.dimension = dimension;
        spec.table = std::move(table);
        spec.validate();
        return spec;
    }

    /// Indicator of the single mesh cell [0, delta): f(0) = 1 and f(k delta) = 0 otherwise.
    static KernelSpec cell_indicator(double delta, int dimension = 1) {
        if (dimension == 1) return tabulated({0.0, 1.0, 0.0}, delta, 1);
        return tabulated({0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0}, delta, 2);
    }

    bool compact() const { return std::isfinite(support_radius); }
    std::string id() const { return to_string(family); }

    void validate() const {
        detail::require_domain(c >= 0.0 && std::isfinite(c), "kernel: amplitude c must be finite and >= 0");
        detail::require_domain(dimension == 1 || dimension == 2, "kernel: dimension must be 1 or 2");
        detail::require_domain(family != KernelFamily::tabulated || table, "kernel: tabulated family needs a table");
        detail::require_domain(family != KernelFamily::gaussian2d || dimension == 2,
                               "kernel: gaussian2d is two-dimensional");
    }

private:
    static KernelSpec make(KernelFamily family, double c, double radius, int dimension) {
        KernelSpec spec;
        spec.family = family;
        spec.c = c;
        spec.support_radius = radius;
        spec.dimension = dimension;
        spec.validate();
        return spec;
    }
};

namespace detail {

inline void check_table_range(const KernelTable& table, double r) {
    if (r > table.half_width * (1.0 + 1e-12))
        throw DomainError("tabulated kernel queried at |t| = " + std::to_string(r) + " outside the table half width " +
                          std::to_string(table.half_width));
}

// Linear interpolation on the upper half of an even table.
inline double table_lookup_1d(const KernelTable& table, double t) {
    const double r = std::abs(t);
    check_table_range(table, r);
    const std::size_t mid = table.points / 2;
    const double pos = r / table.step();
    auto i = static_cast<std::size_t>(pos);
    if (mid + i >= table.points - 1) return table.values.back();
    const double w = pos - static_cast<double>(i);
    const double a = table.values[mid + i];
    const double b = table.values[mid + i + 1];
    return w == 0.0 ? a : a + w * (b - a);
}

inline double table_lookup_2d(const KernelTable& table, double t1, double t2) {
    check_table_range(table, std::abs(t1));
    check_table_range(table, std::abs(t2));
    // f(t) = f(-t): fold the first coordinate onto t1 >= 0.
    if (t1 < 0.0 || (t1 == 0.0 && t2 < 0.0)) {
        t1 = -t1;
        t2 = -t2;
    }
    const std::size_t m = table.points;
    const double h = table.step();
    auto locate = [&](double t, std::size_t& i, double& w) {
        const double pos = (t + table.half_width) / h;
        double fl = std::floor(pos);
        if (fl < 0.0) fl = 0.0;
        if (fl > static_cast<double>(m - 2)) fl = static_cast<double>(m - 2);
        i = static_cast<std::size_t>(fl);
        w = std::min(1.0, std::max(0.0, pos - fl));
    };
    std::size_t i, j;
    double wi, wj;
    locate(t1, i, wi);
    locate(t2, j, wj);
    auto at = [&](std::size_t a, std::size_t b) { return table.values[a * m + b]; };
    double v = (1.0 - wi) * ((1.0 - wj) * at(i, j) + wj * at(i, j + 1)) +
               wi * ((1.0 - wj) * at(i + 1, j) + wj * at(i + 1, j + 1));
    // Exact node hits avoid interpolation round-off.
    if (wi == 0.0 && wj == 0.0) v = at(i, j);
    return v;
}

inline double shape_1d(const KernelSpec& spec, double t) {
    const double r = std::abs(t);
    switch (spec.family) {
        case KernelFamily::triangular: return r <= 1.0 ? 1.0 - r : 0.0;
        case KernelFamily::spherical: return r <= 1.0 ? 1.0 - 1.5 * r + 0.5 * r * r * r : 0.0;
        case KernelFamily::exponential: return std::exp(-r);
        case KernelFamily::tabulated: return table_lookup_1d(*spec.table, t);
        case KernelFamily::gaussian2d: break;
    }
    throw DomainError("kernel '" + spec.id() + "' is not one-dimensional");
}

inline double shape_2d(const KernelSpec& spec, double t1, double t2) {
    if (spec.dimension != 2) throw DomainError("kernel '" + spec.id() + "' is not two-dimensional");
    if (spec.family == KernelFamily::gaussian2d)
        return std::exp(-0.5 * (t1 * t1 + t2 * t2)) / (2.0 * std::numbers::pi);
    return table_lookup_2d(*spec.table, t1, t2);
}

// Integral of shape^2 over the whole space.
inline double shape_l2_squared(const KernelSpec& spec) {
    switch (spec.family) {
        case KernelFamily::triangular: return 2.0 / 3.0;
        case KernelFamily::spherical: return 33.0 / 70.0;
        case KernelFamily::exponential: return 1.0;
        case KernelFamily::gaussian2d: return 1.0 / (4.0 * std::numbers::pi);
        case KernelFamily::tabulated: break;
    }
    // Piecewise (bi)linear interpolant: 3-point Gauss-Legendre per cell and
    // axis integrates the squared interpolant exactly.
    const KernelTable& table = *spec.table;
    const double h = table.step();
    const auto& gauss = boost::math::quadrature::gauss<double, 3>::abscissa();
    const auto& gw = boost::math::quadrature::gauss<double, 3>::weights();
    std::vector<double> nodes, weights;
    for (std::size_t i = 0; i + 1 < table.points; ++i) {
        const double mid = table.node(i) + 0.5 * h;
        // abscissa() holds the non-negative half of the symmetric rule.
        for (std::size_t k = 0; k < gauss.size(); ++k) {
            nodes.push_back(mid + 0.5 * h * gauss[k]);
            weights.push_back(0.5 * h * gw[k]);
            if (gauss[k] != 0.0) {
                nodes.push_back(mid - 0.5 * h * gauss[k]);
                weights.push_back(0.5 * h * gw[k]);
            }
        }
    }
    double sum = 0.0;
    if (spec.dimension == 1) {
        for (std::size_t a = 0; a < nodes.size(); ++a) {
            const double v = table_lookup_1d(table, nodes[a]);
            sum += weights[a] * v * v;
        }
    } else {
        for (std::size_t a = 0; a < nodes.size(); ++a)
            for (std::size_t b = 0; b < nodes.size(); ++b) {
                const double v = table_lookup_2d(table, nodes[a], nodes[b]);
                sum += weights[a] * weights[b] * v * v;
            }
    }
    return sum;
}

}  // namespace detail

/// f(t) for a one-dimensional kernel; exactly even in t.
inline double kernel_eval(const KernelSpec& spec, double t) { return spec.c * detail::shape_1d(spec, t); }

/// f(t1, t2) for a two-dimensional kernel.
inline double kernel_eval(const KernelSpec& spec, double t1, double t2) {
    return spec.c * detail::shape_2d(spec, t1, t2);
}

/// L2 norm of the kernel.
inline double kernel_l2_norm(const KernelSpec& spec) { return spec.c * std::sqrt(detail::shape_l2_squared(spec)); }

/// Copy of `spec` with c chosen so that the kernel has unit L2 norm.
inline KernelSpec normalize_kernel_l2(const KernelSpec& spec) {
    spec.validate();
    const double sq = detail::shape_l2_squared(spec);
    if (!(spec.c > 0.0) || !(sq > 0.0) || !std::isfinite(sq))
        throw NumericError("normalize_kernel_l2: kernel '" + spec.id() + "' has zero or infinite L2 norm");
    KernelSpec out = spec;
    out.c = 1.0 / std::sqrt(sq);
    return out;
}

namespace detail {

inline double spherical_fourier_shape(double lambda) {
    const double l = std::abs(lambda);
    if (l < 1.0) {
        // 2 int_0^1 shape(t) cos(l t) dt expanded in powers of l.
        double sum = 0.0;
        double term = 1.0;  // (-1)^k l^{2k} / (2k)!
        for (int k = 0; k < 14; ++k) {
            const double m = 2.0 * k;
            const double moment = 1.0 / (m + 1.0) - 1.5 / (m + 2.0) + 0.5 / (m + 4.0);
            sum += term * 2.0 * moment;
            term *= -l * l / ((m + 1.0) * (m + 2.0));
        }
        return sum;
    }
    const double l2 = l * l;
    return 3.0 * (l2 - 2.0 * l * std::sin(l) - 2.0 * std::cos(l) + 2.0) / (l2 * l2);
}

inline double tabulated_fourier_1d(const KernelTable& table, double lambda) {
    const auto& x = boost::math::quadrature::gauss<double, 20>::abscissa();
    const auto& w = boost::math::quadrature::gauss<double, 20>::weights();
    const double h = table.step();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < table.points; ++i) {
        const double mid = table.node(i) + 0.5 * h;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double d = 0.5 * h * x[k];
            sum += 0.5 * h * w[k] *
                   (table_lookup_1d(table, mid + d) * std::cos(lambda * (mid + d)) +
                    table_lookup_1d(table, mid - d) * std::cos(lambda * (mid - d)));
        }
    }
    return sum;
}

}  // namespace detail

/// Fourier transform int f(t) e^{-i lambda t} dt of a one-dimensional kernel;
/// real because the kernel is even.
inline double kernel_fourier(const KernelSpec& spec, double lambda) {
    switch (spec.family) {
        case KernelFamily::triangular: {
            const double h = 0.5 * lambda;
            if (h == 0.0) return spec.c;
            const double s = std::sin(h) / h;
            return spec.c * s * s;
        }
        case KernelFamily::spherical: return spec.c * detail::spherical_fourier_shape(lambda);
        case KernelFamily::exponential: return 2.0 * spec.c / (1.0 + lambda * lambda);
        case KernelFamily::tabulated:
            if (spec.dimension == 1) return spec.c * detail::tabulated_fourier_1d(*spec.table, lambda);
            break;
        case KernelFamily::gaussian2d: break;
    }
    throw DomainError("kernel_fourier: kernel '" + spec.id() + "' is not one-dimensional");
}

/// Fourier transform of a two-dimensional kernel at (lambda1, lambda2).
inline double kernel_fourier(const KernelSpec& spec, double lambda1, double lambda2) {
    if (spec.dimension != 2) throw DomainError("kernel_fourier: kernel '" + spec.id() + "' is not two-dimensional");
    if (spec.family == KernelFamily::gaussian2d)
        return spec.c * std::exp(-0.5 * (lambda1 * lambda1 + lambda2 * lambda2));
    const KernelTable& table = *spec.table;
    const auto& x = boost::math::quadrature::gauss<double, 10>::abscissa();
    const auto& w = boost::math::quadrature::gauss<double, 10>::weights();
    const double h = table.step();
    std::vector<double> nodes, weights;
    for (std::size_t i = 0; i + 1 < table.points; ++i) {
        const double mid = table.node(i) + 0.5 * h;
        for (std::size_t k = 0; k < x.size(); ++k) {
            nodes.push_back(mid + 0.5 * h * x[k]);
            nodes.push_back(mid - 0.5 * h * x[k]);
            weights.push_back(0.5 * h * w[k]);
            weights.push_back(0.5 * h * w[k]);
        }
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < nodes.size(); ++a)
        for (std::size_t b = 0; b < nodes.size(); ++b)
            sum += weights[a] * weights[b] * detail::table_lookup_2d(table, nodes[a], nodes[b]) *
                   std::cos(lambda1 * nodes[a] + lambda2 * nodes[b]);
    return spec.c * sum;
}

}  // namespace sasma
