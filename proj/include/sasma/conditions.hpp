#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sasma/error.hpp"
#include "sasma/kernel.hpp"
#include "sasma/spectral.hpp"

namespace sasma {

/// omega_f(delta) = sup_{|t - s| <= delta} |f(t) - f(s)|, evaluated on a grid
/// of step delta / 64 over the support extended by delta. Kernels with
/// unbounded support use the window [-40, 40]; two-dimensional kernels use
/// the section t2 = 0 (exact for radial kernels).
inline double modulus_of_continuity(const KernelSpec& spec, double delta) {
    spec.validate();
    detail::require_domain(delta >= 0.0, "modulus_of_continuity: delta must be >= 0");
    if (delta == 0.0 || spec.c == 0.0) return 0.0;
    const double radius = (spec.compact() ? spec.support_radius : 40.0) + delta;
    constexpr std::size_t max_points = std::size_t{1} << 23;
    double step = delta / 64.0;
    auto points = static_cast<std::size_t>(std::ceil(2.0 * radius / step)) + 1;
    if (points > max_points) {
        points = max_points;
        step = 2.0 * radius / static_cast<double>(points - 1);
    }
    const auto span = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(delta / step * (1.0 + 1e-12))));
    auto f = [&](std::size_t i) {
        const double t = -radius + step * static_cast<double>(i);
        return spec.dimension == 1 ? kernel_eval(spec, t) : kernel_eval(spec, t, 0.0);
    };
    // Sliding-window max - min over span + 1 consecutive nodes.
    std::deque<std::pair<std::size_t, double>> hi, lo;
    double best = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double v = f(i);
        while (!hi.empty() && hi.back().second <= v) hi.pop_back();
        while (!lo.empty() && lo.back().second >= v) lo.pop_back();
        hi.emplace_back(i, v);
        lo.emplace_back(i, v);
        while (hi.front().first + span < i) hi.pop_front();
        while (lo.front().first + span < i) lo.pop_front();
        best = std::max(best, hi.front().second - lo.front().second);
    }
    return best;
}

enum class SequenceRule { log_n, constant, table };

inline std::string to_string(SequenceRule rule) {
    switch (rule) {
        case SequenceRule::log_n: return "log_n";
        case SequenceRule::constant: return "constant";
        case SequenceRule::table: return "table";
    }
    return "unknown";
}

inline SequenceRule sequence_rule_from_string(const std::string& name) {
    if (name == "log_n" || name == "log") return SequenceRule::log_n;
    if (name == "constant") return SequenceRule::constant;
    if (name == "table") return SequenceRule::table;
    throw ConfigError("unknown sequence rule '" + name + "'");
}

enum class FilterKind { uniform, triangular };

inline std::string to_string(FilterKind kind) { return kind == FilterKind::uniform ? "uniform" : "triangular"; }

inline FilterKind filter_kind_from_string(const std::string& name) {
    if (name == "uniform") return FilterKind::uniform;
    if (name == "triangular") return FilterKind::triangular;
    throw ConfigError("unknown filter '" + name + "'");
}

inline SmoothingFilter make_filter(FilterKind kind, std::size_t half_width) {
    return kind == FilterKind::uniform ? SmoothingFilter::uniform(half_width)
                                       : SmoothingFilter::triangular(half_width);
}

/// Schedules Delta_n = n^-delta, m_n = max(1, floor(n^gamma)) and the
/// sequences a_n, b_n over a finite range of n.
struct ScheduleSpec {
    double delta_exponent = 0.5;
    double m_exponent = 0.25;
    FilterKind filter = FilterKind::uniform;
    SequenceRule a_rule = SequenceRule::log_n;
    double a_constant = 20.0;
    std::vector<double> a_table;
    SequenceRule b_rule = SequenceRule::log_n;
    double b_constant = 5.0;
    std::vector<double> b_table;
    std::vector<double> n_range{1e2, 1e3, 1e4, 1e5, 1e6};

    /// gamma >= 1 - delta is accepted here; the W4/A5 verdicts flag it.
    void validate() const {
        detail::require_domain(delta_exponent > 0.0 && delta_exponent < 1.0, "schedule: delta must lie in (0, 1)");
        detail::require_domain(m_exponent > 0.0 && m_exponent < 1.0, "schedule: gamma must lie in (0, 1)");
        detail::require_domain(!n_range.empty(), "schedule: empty n range");
        for (std::size_t i = 0; i < n_range.size(); ++i) {
            detail::require_domain(n_range[i] >= 2.0, "schedule: n values must be >= 2");
            if (i > 0) detail::require_domain(n_range[i] > n_range[i - 1], "schedule: n range must increase");
        }
        if (a_rule == SequenceRule::table)
            detail::require_domain(a_table.size() == n_range.size(), "schedule: a table must match the n range");
        if (b_rule == SequenceRule::table)
            detail::require_domain(b_table.size() == n_range.size(), "schedule: b table must match the n range");
    }

    double delta_n(double n) const { return std::pow(n, -delta_exponent); }
    std::size_t m_n(double n) const {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::pow(n, m_exponent) + 1e-9)));
    }
    double a_n(std::size_t i) const { return sequence(a_rule, a_constant, a_table, i); }
    double b_n(std::size_t i) const { return sequence(b_rule, b_constant, b_table, i); }

private:
    double sequence(SequenceRule rule, double constant, const std::vector<double>& table, std::size_t i) const {
        switch (rule) {
            case SequenceRule::log_n: return std::log(n_range[i]);
            case SequenceRule::constant: return constant;
            case SequenceRule::table: return table[i];
        }
        return constant;
    }
};

enum class Verdict { pass, fail, indeterminate };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::indeterminate: return "indeterminate";
    }
    return "unknown";
}

struct ConditionResult {
    std::string id;
    std::string description;
    /// Defining ratio at each n of the schedule (or the check value for
    /// non-asymptotic conditions).
    std::vector<double> ratios;
    /// Values the verdict was based on.
    std::vector<double> tail;
    Verdict verdict = Verdict::indeterminate;
};

struct ConditionReport {
    std::vector<double> n_range;
    std::vector<ConditionResult> results;
    std::vector<std::string> notes;

    const ConditionResult* find(const std::string& id) const {
        for (const auto& r : results)
            if (r.id == id) return &r;
        return nullptr;
    }

    std::string table() const {
        std::ostringstream os;
        os << std::left << std::setw(6) << "id" << std::setw(15) << "verdict" << std::setw(62) << "condition"
           << "ratios at n\n";
        for (const auto& r : results) {
            os << std::setw(6) << r.id << std::setw(15) << to_string(r.verdict) << std::setw(62) << r.description;
            os << std::setprecision(4);
            for (std::size_t i = 0; i < r.ratios.size(); ++i) os << (i ? " " : "") << r.ratios[i];
            os << '\n';
        }
        for (const auto& note : notes) os << "note: " << note << '\n';
        return os.str();
    }

    std::string csv() const {
        std::ostringstream os;
        os << std::setprecision(17) << "id,verdict";
        for (double n : n_range) os << ",n=" << n;
        os << '\n';
        for (const auto& r : results) {
            os << r.id << ',' << to_string(r.verdict);
            for (double v : r.ratios) os << ',' << v;
            os << '\n';
        }
        return os.str();
    }
};

namespace detail {

/// Trend verdict on the upper half of the sequence (at least three values):
/// pass when strictly decreasing with an overall drop of at least 10 % (or
/// identically zero), fail when nondecreasing, indeterminate otherwise.
inline ConditionResult trend_condition(std::string id, std::string description, std::vector<double> ratios) {
    ConditionResult r{std::move(id), std::move(description), std::move(ratios), {}, Verdict::indeterminate};
    const std::size_t n = r.ratios.size();
    const std::size_t keep = std::min(n, std::max<std::size_t>(3, (n + 1) / 2));
    r.tail.assign(r.ratios.end() - static_cast<std::ptrdiff_t>(keep), r.ratios.end());
    for (double v : r.tail)
        if (!std::isfinite(v)) return r;
    if (std::all_of(r.tail.begin(), r.tail.end(), [](double v) { return v == 0.0; })) {
        r.verdict = Verdict::pass;
        return r;
    }
    bool decreasing = true, nondecreasing = true;
    for (std::size_t i = 1; i < r.tail.size(); ++i) {
        if (!(r.tail[i] < r.tail[i - 1])) decreasing = false;
        if (r.tail[i] < r.tail[i - 1]) nondecreasing = false;
    }
    if (r.tail.size() >= 2 && decreasing && r.tail.back() <= 0.9 * r.tail.front())
        r.verdict = Verdict::pass;
    else if (r.tail.size() >= 2 && nondecreasing)
        r.verdict = Verdict::fail;
    return r;
}

/// Boundedness of sup_{1 <= |t| <= w} |f(t)| |t|^a over growing windows w.
inline ConditionResult decay_condition(const KernelSpec& spec, double a) {
    std::vector<double> sups;
    double sup = 0.0;
    double lo = 1.0;
    for (double w : {10.0, 20.0, 40.0, 80.0, 160.0}) {
        const std::size_t steps = 4000;
        for (std::size_t i = 0; i <= steps; ++i) {
            const double t = lo + (w - lo) * static_cast<double>(i) / static_cast<double>(steps);
            const double v = spec.dimension == 1 ? kernel_eval(spec, t) : kernel_eval(spec, t, 0.0);
            sup = std::max(sup, std::abs(v) * std::pow(t, a));
        }
        lo = w;
        sups.push_back(sup);
    }
    ConditionResult r{"F3'", "f(t) |t|^a bounded on growing windows", sups, sups, Verdict::indeterminate};
    const bool constant = sups.back() <= sups.front() * (1.0 + 1e-9);
    bool increasing = true;
    for (std::size_t i = 1; i < sups.size(); ++i)
        if (!(sups[i] > sups[i - 1] * (1.0 + 1e-9))) increasing = false;
    r.verdict = constant ? Verdict::pass : (increasing ? Verdict::fail : Verdict::indeterminate);
    return r;
}

/// int_{|lambda| > a} g^(lambda)^2 d lambda with g = f / ||f||_2, cut off at 1e3.
inline double fourier_tail_l2(const KernelSpec& spec, double a) {
    constexpr double cutoff = 1e3;
    if (a >= cutoff) return 0.0;
    const KernelSpec g = normalize_kernel_l2(spec);
    auto integrand = [&](double lambda) {
        const double v = kernel_fourier(g, lambda);
        return v * v;
    };
    double err = 0.0;
    // Split at multiples of 2 pi to keep the oscillatory pieces well resolved.
    double total = 0.0;
    double lo = a;
    while (lo < cutoff) {
        const double hi = std::min(cutoff, lo + 8.0 * std::numbers::pi);
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 8, 1e-10, &err);
        lo = hi;
    }
    return 2.0 * total;
}

}  // namespace detail

/// Numerical audit of the filter, frequency-cutoff, kernel and norm-cutoff
/// conditions over the schedule's n range. `a_decay` is the polynomial decay
/// exponent assumed for kernels with unbounded support.
inline ConditionReport check_schedule(const ScheduleSpec& schedule, const KernelSpec& kernel, double alpha,
                                      double a_decay = 3.0) {
    schedule.validate();
    kernel.validate();
    detail::require_domain(alpha > 0.0 && alpha <= 2.0, "check_schedule: alpha must lie in (0, 2]");
    const bool compact = kernel.compact();
    const int d = kernel.dimension;
    const double dd = static_cast<double>(d);
    if (!compact) detail::require_domain(a_decay > std::max(2.0, 1.0 / alpha), "check_schedule: need a > max(2, 1/alpha)");

    ConditionReport report;
    report.n_range = schedule.n_range;
    if (schedule.m_exponent >= 1.0 - schedule.delta_exponent)
        report.notes.push_back("gamma >= 1 - delta: m_n grows at least as fast as n Delta_n");

    const std::size_t count = schedule.n_range.size();
    std::vector<double> w_star(count), w2(count), n_delta(count), delta(count), a(count), omega(count);
    bool w_nonneg = true, w_sum = true;
    for (std::size_t i = 0; i < count; ++i) {
        const double n = schedule.n_range[i];
        delta[i] = schedule.delta_n(n);
        n_delta[i] = n * delta[i];
        a[i] = schedule.a_n(i);
        // Product weights in d dimensions: W* = (max w)^d, W2 = d sum m^2 w(m).
        const SmoothingFilter filter = make_filter(schedule.filter, schedule.m_n(n));
        double sum = 0.0;
        for (double w : filter.weights()) {
            if (w < 0.0) w_nonneg = false;
            sum += w;
        }
        if (std::abs(std::pow(sum, dd) - 1.0) > 1e-12) w_sum = false;
        w_star[i] = std::pow(filter.max_weight(), dd);
        w2[i] = dd * filter.second_moment();
        omega[i] = modulus_of_continuity(kernel, delta[i]);
    }
    auto seq = [&](auto fn) {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) v[i] = fn(i);
        return v;
    };
    auto exact = [&](std::string id, std::string description, bool ok) {
        ConditionResult r{std::move(id), std::move(description), std::vector<double>(count, ok ? 1.0 : 0.0), {},
                          ok ? Verdict::pass : Verdict::fail};
        r.tail = r.ratios;
        report.results.push_back(std::move(r));
    };

    exact("W1", "W_n(m) >= 0", w_nonneg);
    exact("W2", "sum_m W_n(m) = 1", w_sum);
    report.results.push_back(detail::trend_condition("W3", "W_n* -> 0", w_star));
    report.results.push_back(
        detail::trend_condition("W4", "W_n^(2) / (n Delta_n)^2 -> 0", seq([&](std::size_t i) {
                                    return w2[i] / (n_delta[i] * n_delta[i]);
                                })));

    report.results.push_back(detail::trend_condition("A1", "1 / a_n -> 0", seq([&](std::size_t i) { return 1.0 / a[i]; })));
    report.results.push_back(detail::trend_condition(
        "A2", "a_n^{2d} W_n* -> 0", seq([&](std::size_t i) { return std::pow(a[i], 2.0 * dd) * w_star[i]; })));
    report.results.push_back(
        detail::trend_condition("A3", "a_n^{3d/4} / (n Delta_n)^{1/alpha} -> 0", seq([&](std::size_t i) {
                                    return std::pow(a[i], 0.75 * dd) / std::pow(n_delta[i], 1.0 / alpha);
                                })));
    report.results.push_back(detail::trend_condition(
        "A4", "a_n^{d+1} Delta_n -> 0", seq([&](std::size_t i) { return std::pow(a[i], dd + 1.0) * delta[i]; })));
    report.results.push_back(
        detail::trend_condition("A5", "a_n^{2d} W_n^(2) / (n Delta_n)^2 -> 0", seq([&](std::size_t i) {
                                    return std::pow(a[i], 2.0 * dd) * w2[i] / (n_delta[i] * n_delta[i]);
                                })));

    // Positive type: the Fourier transform is nonnegative on a frequency grid.
    {
        double lowest = 0.0, largest = 0.0;
        const int steps = d == 1 ? 2000 : 200;
        for (int i = 0; i <= steps; ++i) {
            const double l1 = -50.0 + 100.0 * i / steps;
            if (d == 1) {
                const double v = kernel_fourier(kernel, l1);
                lowest = std::min(lowest, v);
                largest = std::max(largest, v);
            } else {
                for (int j = 0; j <= steps; ++j) {
                    const double v = kernel_fourier(kernel, l1, -50.0 + 100.0 * j / steps);
                    lowest = std::min(lowest, v);
                    largest = std::max(largest, v);
                }
            }
        }
        const double rel = largest > 0.0 ? lowest / largest : 0.0;
        ConditionResult r{"F1", "Fourier transform of f >= 0 on [-50, 50]^d", std::vector<double>(count, rel),
                          {rel}, rel >= -1e-10 ? Verdict::pass : Verdict::fail};
        report.results.push_back(std::move(r));
    }

    if (compact) {
        report.results.push_back(detail::trend_condition(
            "F2", "a_n^d omega_f(Delta_n) -> 0", seq([&](std::size_t i) { return std::pow(a[i], dd) * omega[i]; })));
    } else {
        report.results.push_back(
            detail::trend_condition("F2'", "a_n^d omega_f(Delta_n)^{1/d - 1/a} -> 0", seq([&](std::size_t i) {
                                        return std::pow(a[i], dd) * std::pow(omega[i], 1.0 / dd - 1.0 / a_decay);
                                    })));
        report.results.push_back(detail::decay_condition(kernel, a_decay));
        report.results.push_back(detail::trend_condition(
            "F4'", "a_n^{3d/4} / (omega^{1/(a alpha)} (n Delta_n)^{1/alpha}) -> 0", seq([&](std::size_t i) {
                return std::pow(a[i], 0.75 * dd) /
                       (std::pow(omega[i], 1.0 / (a_decay * alpha)) * std::pow(n_delta[i], 1.0 / alpha));
            })));

        if (d == 1) {
            std::vector<double> b(count), bf(count);
            for (std::size_t i = 0; i < count; ++i) {
                b[i] = schedule.b_n(i);
                bf[i] = std::pow(b[i], 2.0 / alpha - 1.0);
            }
            report.results.push_back(
                detail::trend_condition("B1", "1 / b_n -> 0", seq([&](std::size_t i) { return 1.0 / b[i]; })));
            report.results.push_back(detail::trend_condition(
                "B2", "b^{2/alpha-1} a_n^2 W_n* -> 0", seq([&](std::size_t i) { return bf[i] * a[i] * a[i] * w_star[i]; })));
            report.results.push_back(
                detail::trend_condition("B3", "b^{2/alpha-1} a_n / (n Delta_n)^{1/alpha} -> 0", seq([&](std::size_t i) {
                                            return bf[i] * a[i] / std::pow(n_delta[i], 1.0 / alpha);
                                        })));
            report.results.push_back(detail::trend_condition(
                "B4", "b^{2/alpha-1} a_n^4 Delta_n^2 -> 0",
                seq([&](std::size_t i) { return bf[i] * std::pow(a[i], 4.0) * delta[i] * delta[i]; })));
            report.results.push_back(
                detail::trend_condition("B5", "b^{2/alpha-1} a_n^2 W^(2) / (n Delta_n)^2 -> 0", seq([&](std::size_t i) {
                                            return bf[i] * a[i] * a[i] * w2[i] / (n_delta[i] * n_delta[i]);
                                        })));
            report.results.push_back(
                detail::trend_condition("B6", "b^{2/alpha-1} a_n^2 omega^{2-2/a} -> 0", seq([&](std::size_t i) {
                                            return bf[i] * a[i] * a[i] * std::pow(omega[i], 2.0 - 2.0 / a_decay);
                                        })));
            report.results.push_back(
                detail::trend_condition("B7", "b^{2/alpha-1} int_{|l|>a_n} g^2 -> 0", seq([&](std::size_t i) {
                                            return bf[i] * detail::fourier_tail_l2(kernel, a[i]);
                                        })));
        } else {
            report.notes.push_back("norm-cutoff conditions B1-B7 are defined for d = 1 only; skipped");
        }
    }
    return report;
}

}  // namespace sasma
