#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sasma/error.hpp"
#include "sasma/fft_convolve.hpp"
#include "sasma/kernel.hpp"
#include "sasma/levy.hpp"
#include "sasma/rng.hpp"
#include "sasma/stable.hpp"

namespace sasma {

enum class IntegratorKind { sas, skewed_stable, gaussian, gamma, truncated_levy };

inline std::string to_string(IntegratorKind kind) {
    switch (kind) {
        case IntegratorKind::sas: return "sas";
        case IntegratorKind::skewed_stable: return "skewed";
        case IntegratorKind::gaussian: return "gaussian";
        case IntegratorKind::gamma: return "gamma";
        case IntegratorKind::truncated_levy: return "levy";
    }
    return "unknown";
}

inline IntegratorKind integrator_kind_from_string(const std::string& name) {
    if (name == "sas") return IntegratorKind::sas;
    if (name == "skewed") return IntegratorKind::skewed_stable;
    if (name == "gaussian") return IntegratorKind::gaussian;
    if (name == "gamma") return IntegratorKind::gamma;
    if (name == "levy") return IntegratorKind::truncated_levy;
    throw ConfigError("unknown integrator '" + name + "' (expected sas, skewed, gaussian, gamma or levy)");
}

/// Law of the independently scattered random measure driving the moving average.
///
/// For a cell of Lebesgue measure v the increment is
///   sas / skewed:  S_alpha(v^{1/alpha}, beta, 0)
///   gaussian:      N(0, v)
///   gamma:         Gamma(shape v, rate 1)
///   levy:          xi(v) of the truncated Levy process
struct Integrator {
    IntegratorKind kind = IntegratorKind::sas;
    double alpha = 2.0;
    double beta = 0.0;
    LevyDensityParams levy{};

    static Integrator sas(double alpha) { return {IntegratorKind::sas, alpha, 0.0, {}}; }
    static Integrator skewed(double alpha, double beta) { return {IntegratorKind::skewed_stable, alpha, beta, {}}; }
    static Integrator gaussian() { return {IntegratorKind::gaussian, 2.0, 0.0, {}}; }
    static Integrator gamma() { return {IntegratorKind::gamma, 2.0, 0.0, {}}; }
    static Integrator truncated_levy(const LevyDensityParams& params) {
        return {IntegratorKind::truncated_levy, 2.0, 0.0, params};
    }

    bool stable() const { return kind == IntegratorKind::sas || kind == IntegratorKind::skewed_stable; }

    void validate() const {
        if (stable()) StableLaw(alpha, kind == IntegratorKind::sas ? 0.0 : beta, 1.0).validate();
        if (kind == IntegratorKind::truncated_levy) levy.validate();
    }
};

/// `count` iid increments of the integrator over cells of measure `cell_measure`,
/// drawn in order from the stream.
inline std::vector<double> draw_increments(const Integrator& integrator, double cell_measure, std::size_t count,
                                           RngStream& rng) {
    integrator.validate();
    detail::require_domain(cell_measure > 0.0, "draw_increments: cell measure must be positive");
    switch (integrator.kind) {
        case IntegratorKind::sas:
            return sample_sas(StableLaw::symmetric(integrator.alpha, std::pow(cell_measure, 1.0 / integrator.alpha)),
                              count, rng);
        case IntegratorKind::skewed_stable:
            return sample_skewed_stable(
                StableLaw(integrator.alpha, integrator.beta, std::pow(cell_measure, 1.0 / integrator.alpha)), count,
                rng);
        case IntegratorKind::gaussian: {
            std::vector<double> out(count);
            const double sd = std::sqrt(cell_measure);
            for (auto& x : out) x = sd * rng.normal();
            return out;
        }
        case IntegratorKind::gamma: return sample_gamma_increment(cell_measure, count, rng);
        case IntegratorKind::truncated_levy:
            return sample_trunc_levy_increment(integrator.levy, cell_measure, count, rng);
    }
    throw ConfigError("draw_increments: unknown integrator");
}

struct SampleMeta {
    std::string kernel_id;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Observations X(j delta), j = 1..n, of a moving-average process.
/// The sum of squares is computed once on construction.
class SampledPath {
public:
    SampledPath(std::vector<double> values, double delta, double alpha, SampleMeta meta = {})
        : values_(std::move(values)), delta_(delta), alpha_(alpha), meta_(std::move(meta)) {
        detail::require_domain(values_.size() >= 2, "sampled path: need at least 2 observations");
        detail::require_domain(delta_ > 0.0 && std::isfinite(delta_), "sampled path: delta must be positive");
        for (double v : values_) {
            if (!std::isfinite(v)) throw NumericError("sampled path: non-finite observation");
            sum_squares_ += v * v;
        }
    }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double delta() const noexcept { return delta_; }
    double alpha() const noexcept { return alpha_; }
    const SampleMeta& meta() const noexcept { return meta_; }
    double sum_squares() const noexcept { return sum_squares_; }

    SampledPath scaled(double factor) const {
        std::vector<double> v(values_);
        for (auto& x : v) x *= factor;
        return SampledPath(std::move(v), delta_, alpha_, meta_);
    }

private:
    std::vector<double> values_;
    double delta_;
    double alpha_;
    SampleMeta meta_;
    double sum_squares_ = 0.0;
};

/// Observations X(j1 delta, j2 delta) on an n x n grid, row-major in j1.
class SampledField {
public:
    SampledField(std::vector<double> values, std::size_t n, double delta, double alpha, SampleMeta meta = {})
        : values_(std::move(values)), n_(n), delta_(delta), alpha_(alpha), meta_(std::move(meta)) {
        detail::require_domain(n_ >= 2 && values_.size() == n_ * n_, "sampled field: need a square n x n grid");
        detail::require_domain(delta_ > 0.0 && std::isfinite(delta_), "sampled field: delta must be positive");
        for (double v : values_) {
            if (!std::isfinite(v)) throw NumericError("sampled field: non-finite observation");
            sum_squares_ += v * v;
        }
    }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t n() const noexcept { return n_; }
    double at(std::size_t j1, std::size_t j2) const { return values_[j1 * n_ + j2]; }
    double delta() const noexcept { return delta_; }
    double alpha() const noexcept { return alpha_; }
    const SampleMeta& meta() const noexcept { return meta_; }
    double sum_squares() const noexcept { return sum_squares_; }

    SampledField scaled(double factor) const {
        std::vector<double> v(values_);
        for (auto& x : v) x *= factor;
        return SampledField(std::move(v), n_, delta_, alpha_, meta_);
    }

private:
    std::vector<double> values_;
    std::size_t n_;
    double delta_;
    double alpha_;
    SampleMeta meta_;
    double sum_squares_ = 0.0;
};

enum class ConvolutionMethod { automatic, direct, fft };

struct SimulationOptions {
    ConvolutionMethod method = ConvolutionMethod::automatic;
    /// Multiply-add count above which the automatic method switches to FFT.
    double fft_threshold = 1e6;
    /// Upper bound on the number of doubles held by one simulation.
    std::size_t memory_budget = std::size_t{1} << 27;
};

/// Half-width N = ceil(T / delta) of the discretised kernel (k = -N..N-1).
inline std::size_t kernel_half_width(double truncation_radius, double delta) {
    detail::require_domain(delta > 0.0, "simulation: delta must be positive");
    detail::require_domain(truncation_radius >= delta * (1.0 - 1e-9),
                           "simulation: truncation radius must be at least delta");
    const double ratio = truncation_radius / delta;
    // Tolerate round-off in T / delta (20 / 0.01 is not exactly 2000).
    return static_cast<std::size_t>(std::ceil(ratio - 1e-9 * ratio));
}

namespace detail {

inline void check_budget(double required, const SimulationOptions& options, const std::string& what) {
    if (required > static_cast<double>(options.memory_budget))
        throw ResourceError(what + " needs " + std::to_string(static_cast<long long>(required)) +
                            " doubles (~" + std::to_string(static_cast<long long>(required * 8.0 / (1 << 20))) +
                            " MiB), above the budget of " + std::to_string(options.memory_budget) +
                            " doubles; reduce n or the truncation radius, or raise the budget");
}

inline bool use_fft(const SimulationOptions& options, double multiply_adds) {
    if (options.method == ConvolutionMethod::direct) return false;
    if (options.method == ConvolutionMethod::fft) return true;
    return multiply_adds > options.fft_threshold;
}

}  // namespace detail

/// Left-endpoint discretisation of the moving average on the mesh j delta:
///   X_j = sum_{k=-N}^{N-1} f(k delta) eps_{j-k},   j = 1..n,
/// with eps_l the integrator increment over ((l-1) delta, l delta]. The
/// n + 2N - 1 increments eps_{2-N}, ..., eps_{n+N} are drawn in index order.
inline SampledPath simulate_ma_1d(const KernelSpec& spec, const Integrator& integrator, std::size_t n, double delta,
                                  double truncation_radius, RngStream& rng, const SimulationOptions& options = {}) {
    spec.validate();
    detail::require_domain(spec.dimension == 1, "simulate_ma_1d: kernel must be one-dimensional");
    detail::require_domain(n >= 2, "simulate_ma_1d: n must be >= 2");
    const std::size_t N = kernel_half_width(truncation_radius, delta);
    const std::size_t width = 2 * N;
    const std::size_t count = n + width - 1;
    detail::check_budget(static_cast<double>(count) * 3.0 + static_cast<double>(width), options,
                         "simulate_ma_1d");

    std::vector<double> weights(width);
    for (std::size_t q = 0; q < width; ++q) {
        const double k = static_cast<double>(q) - static_cast<double>(N);
        weights[q] = detail::shape_1d(spec, k * delta);
    }
    const std::vector<double> eps = draw_increments(integrator, delta, count, rng);

    std::vector<double> x;
    if (detail::use_fft(options, static_cast<double>(n) * static_cast<double>(width))) {
        x = detail::fft_convolve_2d(weights, 1, width, eps, 1, count, 0, 1, width - 1, n);
    } else {
        // X_j = sum_q weights[q] * eps[j - q + 2N - 2] for j = 1..n (0-based j-1 below).
        x.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            const std::size_t base = j + width - 1;
            for (std::size_t q = 0; q < width; ++q) sum += weights[q] * eps[base - q];
            x[j] = sum;
        }
    }
    for (auto& v : x) v *= spec.c;
    return SampledPath(std::move(x), delta, integrator.alpha,
                       SampleMeta{spec.id(), rng.seed(), rng.stream_id()});
}

/// Two-dimensional analogue on an n x n grid: cells of area delta^2, kernel
/// sampled at (k1 delta, k2 delta) for k1, k2 in [-N, N-1], increments drawn
/// row-major over (n + 2N - 1)^2 cells.
inline SampledField simulate_ma_2d(const KernelSpec& spec, const Integrator& integrator, std::size_t n,
                                   double delta, double truncation_radius, RngStream& rng,
                                   const SimulationOptions& options = {}) {
    spec.validate();
    detail::require_domain(spec.dimension == 2, "simulate_ma_2d: kernel must be two-dimensional");
    detail::require_domain(n >= 2, "simulate_ma_2d: n must be >= 2");
    const std::size_t N = kernel_half_width(truncation_radius, delta);
    const std::size_t width = 2 * N;
    const std::size_t side = n + width - 1;
    const double cells = static_cast<double>(side) * static_cast<double>(side);
    detail::check_budget(cells * 4.0 + static_cast<double>(width) * static_cast<double>(width), options,
                         "simulate_ma_2d");

    std::vector<double> weights(width * width);
    for (std::size_t a = 0; a < width; ++a)
        for (std::size_t b = 0; b < width; ++b) {
            const double k1 = static_cast<double>(a) - static_cast<double>(N);
            const double k2 = static_cast<double>(b) - static_cast<double>(N);
            weights[a * width + b] = detail::shape_2d(spec, k1 * delta, k2 * delta);
        }
    const std::vector<double> eps = draw_increments(integrator, delta * delta, side * side, rng);

    std::vector<double> x;
    const double work = static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(width * width);
    if (detail::use_fft(options, work)) {
        x = detail::fft_convolve_2d(weights, width, width, eps, side, side, width - 1, n, width - 1, n);
    } else {
        x.assign(n * n, 0.0);
        for (std::size_t j1 = 0; j1 < n; ++j1)
            for (std::size_t j2 = 0; j2 < n; ++j2) {
                double sum = 0.0;
                const std::size_t b1 = j1 + width - 1;
                const std::size_t b2 = j2 + width - 1;
                for (std::size_t a = 0; a < width; ++a) {
                    const double* row = &eps[(b1 - a) * side];
                    const double* w = &weights[a * width];
                    for (std::size_t b = 0; b < width; ++b) sum += w[b] * row[b2 - b];
                }
                x[j1 * n + j2] = sum;
            }
    }
    for (auto& v : x) v *= spec.c;
    return SampledField(std::move(x), n, delta, integrator.alpha, SampleMeta{spec.id(), rng.seed(), rng.stream_id()});
}

}  // namespace sasma
