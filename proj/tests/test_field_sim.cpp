#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "sasma/sasma.hpp"

using namespace sasma;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
constexpr double inf = std::numeric_limits<double>::infinity();

// Fourier transform of an even 1D function by direct quadrature.
template <class F>
double quad_fourier(F f, double lambda, double radius) {
    auto g = [&](double t) { return f(t) * std::cos(lambda * t); };
    if (std::isinf(radius)) return 2.0 * GK::integrate(g, 0.0, inf, 15, 1e-12);
    return 2.0 * GK::integrate(g, 0.0, radius, 15, 1e-12);
}

double ks_against(std::vector<double> x, double alpha, double scale) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = sas_cdf(x[i] / scale, alpha);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d * std::sqrt(n);
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST(Kernel, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::triangular(), 0.5), 0.5);
    EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::triangular(), 1.5), 0.0);
    EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::spherical(), 0.5), 1.0 - 0.75 + 0.0625);
    EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::exponential(2.0), 1.0), 2.0 * std::exp(-1.0));
    EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::gaussian2d(), 0.0, 0.0), 1.0 / (2.0 * std::numbers::pi));
}

TEST(Kernel, EvenOnAGrid) {
    const std::vector<double> table{0.0, 0.2, 0.7, 1.0, 0.7, 0.2, 0.0};
    for (const auto& k : {KernelSpec::triangular(1.3), KernelSpec::spherical(), KernelSpec::exponential(0.4),
                          KernelSpec::tabulated(table, 1.5)})
        for (int i = 0; i <= 1000; ++i) {
            const double t = 1.5 * i / 1000.0;
            EXPECT_EQ(kernel_eval(k, t), kernel_eval(k, -t)) << k.id() << " t=" << t;
        }
}

TEST(Kernel, L2NormalisationAgainstQuadrature) {
    const auto tri = normalize_kernel_l2(KernelSpec::triangular(5.0));
    EXPECT_NEAR(tri.c, std::sqrt(1.5), 1e-12);
    for (const auto& k : {KernelSpec::spherical(), KernelSpec::exponential(3.0)}) {
        const double sq = 2.0 * GK::integrate([&](double t) { return std::pow(kernel_eval(k, t), 2); }, 0.0,
                                              k.compact() ? k.support_radius : inf, 15, 1e-13);
        EXPECT_NEAR(kernel_l2_norm(k), std::sqrt(sq), 1e-10) << k.id();
        const auto u = normalize_kernel_l2(k);
        EXPECT_NEAR(kernel_l2_norm(u), 1.0, 1e-12);
        EXPECT_NEAR(normalize_kernel_l2(u).c, u.c, 1e-14);
    }
    EXPECT_NEAR(kernel_l2_norm(normalize_kernel_l2(KernelSpec::gaussian2d(7.0))), 1.0, 1e-12);
    EXPECT_THROW(normalize_kernel_l2(KernelSpec::triangular(0.0)), NumericError);
}

TEST(Kernel, FourierTransformsAgainstQuadrature) {
    const std::vector<double> table{0.0, 0.25, 0.5, 1.0, 0.5, 0.25, 0.0};
    const auto tab = KernelSpec::tabulated(table, 1.5);
    for (double lambda : {0.0, 0.3, 1.0, 2.5, 7.0, 20.0}) {
        for (const auto& k : {KernelSpec::triangular(), KernelSpec::spherical(), KernelSpec::exponential()}) {
            const double ref = quad_fourier([&](double t) { return kernel_eval(k, t); }, lambda, k.support_radius);
            EXPECT_NEAR(kernel_fourier(k, lambda), ref, 1e-9) << k.id() << " lambda=" << lambda;
        }
        double ref = 0.0;
        for (int i = 0; i < 3; ++i)
            ref += 2.0 * GK::integrate([&](double t) { return kernel_eval(tab, t) * std::cos(lambda * t); }, 0.5 * i,
                                       0.5 * (i + 1), 10, 1e-13);
        EXPECT_NEAR(kernel_fourier(tab, lambda), ref, 1e-9) << "tabulated lambda=" << lambda;
    }
    // The planar Gaussian separates into two 1D transforms.
    const auto g = KernelSpec::gaussian2d();
    for (double l1 : {0.0, 1.0}) {
        for (double l2 : {0.5, 2.0}) {
            auto one = [](double l) {
                return quad_fourier([](double t) { return std::exp(-0.5 * t * t); }, l, inf);
            };
            EXPECT_NEAR(kernel_fourier(g, l1, l2), one(l1) * one(l2) / (2.0 * std::numbers::pi), 1e-9);
        }
    }
}

TEST(Kernel, FourierTransformNonnegative) {
    for (const auto& k : {KernelSpec::triangular(), KernelSpec::spherical(), KernelSpec::exponential()})
        for (int i = 0; i <= 2000; ++i) EXPECT_GE(kernel_fourier(k, -50.0 + 0.05 * i), -1e-12) << k.id();
}

TEST(Kernel, TabulatedValidation) {
    EXPECT_THROW(KernelSpec::tabulated({0.0, 1.0, 0.5}, 1.0), DomainError);
    EXPECT_THROW(KernelSpec::tabulated({0.0, 1.0, 1.0, 0.0}, 1.0), DomainError);
    EXPECT_THROW(KernelSpec::triangular(-1.0), DomainError);
    EXPECT_THROW(kernel_fourier(KernelSpec::gaussian2d(), 1.0), DomainError);
}

TEST(Simulate1D, CellIndicatorGivesIidIncrements) {
    const double alpha = 1.5, delta = 0.1;
    RngStream rng(31, 0);
    const auto path = simulate_ma_1d(KernelSpec::cell_indicator(delta), Integrator::sas(alpha), 5000, delta, delta, rng);
    std::vector<double> x(path.values().begin(), path.values().end());
    EXPECT_LT(ks_against(x, alpha, std::pow(delta, 1.0 / alpha)), 1.6276);
}

TEST(Simulate1D, ZeroKernelGivesZeroPath) {
    RngStream rng(1, 0);
    const auto p = simulate_ma_1d(KernelSpec::triangular(0.0), Integrator::sas(1.5), 100, 0.1, 1.0, rng);
    for (double v : p.values()) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(Periodogram{p}, NumericError);
}

TEST(Simulate1D, MatchesBruteForceConvolution) {
    const auto kernel = KernelSpec::triangular(1.7);
    const double alpha = 1.7, delta = 0.25, radius = 1.0;
    const std::size_t n = 16;
    RngStream rng(8, 2), oracle_rng(8, 2);
    const auto path = simulate_ma_1d(kernel, Integrator::sas(alpha), n, delta, radius, rng,
                                     SimulationOptions{ConvolutionMethod::direct});
    // eps_l covers ((l-1) delta, l delta] for l = 2-N .. n+N, drawn in order.
    const long N = 4;
    const auto eps = sample_sas(StableLaw::symmetric(alpha, std::pow(delta, 1.0 / alpha)), n + 2 * N - 1, oracle_rng);
    auto e = [&](long l) { return eps[static_cast<std::size_t>(l - (2 - N))]; };
    for (long j = 1; j <= static_cast<long>(n); ++j) {
        double x = 0.0;
        for (long k = -N; k <= N - 1; ++k) x += kernel_eval(kernel, k * delta) * e(j - k);
        EXPECT_NEAR(path.values()[j - 1], x, 1e-12) << "j=" << j;
    }
}

TEST(Simulate1D, FftAgreesWithDirect) {
    const auto kernel = normalize_kernel_l2(KernelSpec::exponential());
    RngStream a(19, 0), b(19, 0);
    const auto direct = simulate_ma_1d(kernel, Integrator::sas(1.2), 2000, 0.01, 20.0, a,
                                       SimulationOptions{ConvolutionMethod::direct});
    const auto fft = simulate_ma_1d(kernel, Integrator::sas(1.2), 2000, 0.01, 20.0, b,
                                    SimulationOptions{ConvolutionMethod::fft});
    std::vector<double> d(direct.values().begin(), direct.values().end());
    double diff = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) diff = std::max(diff, std::abs(d[i] - fft.values()[i]));
    EXPECT_LT(diff / max_abs(d), 1e-10);
}

TEST(Simulate1D, AmplitudeIsExactlyLinear) {
    RngStream a(3, 3), b(3, 3);
    const auto unit = simulate_ma_1d(KernelSpec::spherical(1.0), Integrator::sas(1.4), 300, 0.05, 1.0, a);
    const auto scaled = simulate_ma_1d(KernelSpec::spherical(2.75), Integrator::sas(1.4), 300, 0.05, 1.0, b);
    for (std::size_t i = 0; i < unit.size(); ++i) EXPECT_EQ(scaled.values()[i], 2.75 * unit.values()[i]);
}

TEST(Simulate1D, MarginalsAreStationary) {
    const auto kernel = normalize_kernel_l2(KernelSpec::triangular());
    const std::size_t reps = 2000, n = 100;
    std::vector<double> early(reps), late(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        RngStream rng(55, r);
        const auto p = simulate_ma_1d(kernel, Integrator::sas(1.7), n, 0.05, 1.0, rng);
        early[r] = p.values()[n / 4];
        late[r] = p.values()[3 * n / 4];
    }
    std::sort(early.begin(), early.end());
    std::sort(late.begin(), late.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < reps && j < reps) {
        const double x = std::min(early[i], late[j]);
        while (i < reps && early[i] <= x) ++i;
        while (j < reps && late[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) - double(j)) / reps);
    }
    EXPECT_LT(d, 1.6276 * std::sqrt(2.0 / reps));
}

TEST(Simulate1D, OtherIntegratorsRun) {
    const auto kernel = KernelSpec::triangular();
    for (const auto& integ : {Integrator::gaussian(), Integrator::gamma(), Integrator::skewed(1.5, 0.5),
                              Integrator::truncated_levy(LevyDensityParams{})}) {
        RngStream rng(2, 0);
        const auto p = simulate_ma_1d(kernel, integ, 200, 0.05, 1.0, rng);
        EXPECT_EQ(p.size(), 200u);
        EXPECT_GT(p.sum_squares(), 0.0);
    }
}

TEST(Simulate1D, ResourceAndDomainErrors) {
    RngStream rng(1, 0);
    SimulationOptions small;
    small.memory_budget = 1000;
    try {
        simulate_ma_1d(KernelSpec::exponential(), Integrator::sas(1.5), 1000, 0.01, 20.0, rng, small);
        FAIL() << "expected ResourceError";
    } catch (const ResourceError& e) {
        EXPECT_NE(std::string(e.what()).find("needs"), std::string::npos);
    }
    EXPECT_THROW(simulate_ma_1d(KernelSpec::triangular(), Integrator::sas(1.5), 1, 0.01, 1.0, rng), DomainError);
    EXPECT_THROW(simulate_ma_1d(KernelSpec::triangular(), Integrator::sas(1.5), 10, 0.0, 1.0, rng), DomainError);
    EXPECT_THROW(simulate_ma_1d(KernelSpec::gaussian2d(), Integrator::sas(1.5), 10, 0.1, 1.0, rng), DomainError);
    EXPECT_THROW(simulate_ma_1d(KernelSpec::tabulated({0.0, 1.0, 0.0}, 0.5), Integrator::sas(1.5), 10, 0.1, 2.0, rng),
                 DomainError);
}

TEST(Simulate2D, CellIndicatorGivesIidIncrements) {
    const double alpha = 1.8, delta = 0.2;
    RngStream rng(32, 0);
    const auto field =
        simulate_ma_2d(KernelSpec::cell_indicator(delta, 2), Integrator::sas(alpha), 70, delta, delta, rng);
    std::vector<double> x(field.values().begin(), field.values().end());
    EXPECT_LT(ks_against(x, alpha, std::pow(delta * delta, 1.0 / alpha)), 1.6276);
}

TEST(Simulate2D, MatchesBruteForceAndFft) {
    const auto kernel = KernelSpec::gaussian2d();
    const double alpha = 1.8, delta = 0.1, radius = 0.5;
    const std::size_t n = 24;
    const long N = 5, side = static_cast<long>(n) + 2 * N - 1;
    RngStream a(40, 0), b(40, 0), oracle(40, 0);
    const auto direct = simulate_ma_2d(kernel, Integrator::sas(alpha), n, delta, radius, a,
                                       SimulationOptions{ConvolutionMethod::direct});
    const auto fft = simulate_ma_2d(kernel, Integrator::sas(alpha), n, delta, radius, b,
                                    SimulationOptions{ConvolutionMethod::fft});
    const auto eps = sample_sas(StableLaw::symmetric(alpha, std::pow(delta * delta, 1.0 / alpha)),
                                static_cast<std::size_t>(side * side), oracle);
    auto e = [&](long l1, long l2) { return eps[static_cast<std::size_t>((l1 - (2 - N)) * side + (l2 - (2 - N)))]; };
    double scale = 0.0, err_direct = 0.0, err_fft = 0.0;
    for (long j1 = 1; j1 <= static_cast<long>(n); ++j1)
        for (long j2 = 1; j2 <= static_cast<long>(n); ++j2) {
            double x = 0.0;
            for (long k1 = -N; k1 <= N - 1; ++k1)
                for (long k2 = -N; k2 <= N - 1; ++k2)
                    x += kernel_eval(kernel, k1 * delta, k2 * delta) * e(j1 - k1, j2 - k2);
            scale = std::max(scale, std::abs(x));
            err_direct = std::max(err_direct, std::abs(direct.at(j1 - 1, j2 - 1) - x));
            err_fft = std::max(err_fft, std::abs(fft.at(j1 - 1, j2 - 1) - x));
        }
    EXPECT_LT(err_direct / scale, 1e-12);
    EXPECT_LT(err_fft / scale, 1e-10);
}
