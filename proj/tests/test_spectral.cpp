#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "sasma/sasma.hpp"

using namespace sasma;

namespace {

// |sum_j x_j e^{i j delta lambda}|^2 / sum_j x_j^2 in long double, j = 1..n.
long double brute_periodogram(const std::vector<double>& x, double delta, double lambda) {
    std::complex<long double> s = 0.0L;
    long double ss = 0.0L;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const long double arg = static_cast<long double>(j + 1) * delta * lambda;
        s += static_cast<long double>(x[j]) * std::complex<long double>(std::cos(arg), std::sin(arg));
        ss += static_cast<long double>(x[j]) * x[j];
    }
    return std::norm(s) / ss;
}

SampledPath random_path(std::size_t n, double delta, std::uint64_t seed) {
    RngStream rng(seed, 0);
    return SampledPath(sample_sas(StableLaw::symmetric(1.5), n, rng), delta, 1.5);
}

SampledField random_field(std::size_t n, double delta, std::uint64_t seed) {
    RngStream rng(seed, 0);
    return SampledField(sample_sas(StableLaw::symmetric(1.8), n * n, rng), n, delta, 1.8);
}

}  // namespace

TEST(Filter, UniformAndTriangularWeights) {
    const auto u = SmoothingFilter::uniform(2);
    for (long m = -2; m <= 2; ++m) EXPECT_DOUBLE_EQ(u.weight(m), 0.2);
    EXPECT_DOUBLE_EQ(u.max_weight(), 0.2);
    EXPECT_DOUBLE_EQ(u.second_moment(), 2.0);
    const auto t = SmoothingFilter::triangular(2);
    EXPECT_DOUBLE_EQ(t.weight(0), 3.0 / 9.0);
    EXPECT_DOUBLE_EQ(t.weight(-2), 1.0 / 9.0);
    EXPECT_THROW(SmoothingFilter::uniform(0), DomainError);
    EXPECT_THROW(SmoothingFilter(1, {0.5, 0.6, -0.1}), DomainError);
    EXPECT_THROW(SmoothingFilter(1, {0.5, 0.6, 0.1}), DomainError);
}

TEST(Periodogram, MatchesBruteForceDft) {
    const auto path = random_path(32, 0.1, 1);
    std::vector<double> x(path.values().begin(), path.values().end());
    const Periodogram pg(path);
    for (double lambda : {0.0, 0.37, 3.0, 17.5, -9.1, 120.0}) {
        const double ref = static_cast<double>(brute_periodogram(x, 0.1, lambda));
        EXPECT_NEAR(pg.raw(lambda), ref, 1e-10 * std::max(1.0, ref)) << "lambda=" << lambda;
    }
}

TEST(Periodogram, LongPathAgreesWithLongDoubleReference) {
    const auto path = random_path(20000, 0.01, 2);
    std::vector<double> x(path.values().begin(), path.values().end());
    const Periodogram pg(path);
    for (double lambda : {1.3, 19.9}) {
        const double ref = static_cast<double>(brute_periodogram(x, 0.01, lambda));
        EXPECT_NEAR(pg.raw(lambda), ref, 1e-9 * std::max(1.0, ref)) << "lambda=" << lambda;
    }
}

TEST(Periodogram, ZeroFrequencyAndSingleSpike) {
    const SampledPath p({1.0, -2.0, 0.5, 3.0}, 0.5, 1.5);
    EXPECT_NEAR(self_normalized_periodogram(p, 0.0), 2.5 * 2.5 / 14.25, 1e-15);
    const SampledPath spike({0.0, 0.0, 4.2, 0.0, 0.0}, 0.3, 1.5);
    for (double lambda : {0.0, 1.0, 7.7}) EXPECT_NEAR(self_normalized_periodogram(spike, lambda), 1.0, 1e-14);
}

TEST(Periodogram, EvenBoundedAndScaleInvariant) {
    const auto path = random_path(500, 0.02, 3);
    const auto scaled = path.scaled(-7.3);
    const Periodogram pg(path), ps(scaled);
    const auto filter = SmoothingFilter::uniform(3);
    for (int k = 0; k <= 200; ++k) {
        const double lambda = 0.25 * k;
        const double i = pg.raw(lambda);
        EXPECT_NEAR(i, pg.raw(-lambda), 1e-12 * std::max(1.0, i));
        EXPECT_GE(i, 0.0);
        EXPECT_LE(i, 500.0 * (1.0 + 1e-12));
        const double s = pg.smoothed(lambda, filter);
        EXPECT_NEAR(s, pg.smoothed(-lambda, filter), 1e-12 * std::max(1.0, s));
        EXPECT_GE(s, 0.0);
        EXPECT_LE(s, 500.0 * (1.0 + 1e-12));
        EXPECT_NEAR(ps.raw(lambda), i, 1e-12 * std::max(1.0, i));
    }
}

TEST(Periodogram, SmoothingMatchesExplicitShiftedAverage) {
    const auto path = random_path(200, 0.05, 4);
    const Periodogram pg(path);
    const double shift = 1.0 / (200 * 0.05);
    for (double lambda : {0.0, 2.2, 13.0}) {
        double uniform = 0.0;
        for (int m = -2; m <= 2; ++m) uniform += pg.raw(lambda + m * shift) / 5.0;
        EXPECT_NEAR(pg.smoothed(lambda, SmoothingFilter::uniform(2)), uniform, 1e-12 * std::max(1.0, uniform));
        EXPECT_EQ(pg.smoothed(lambda, SmoothingFilter::identity(2)), pg.raw(lambda));
        const double m1 = (pg.raw(lambda - shift) + pg.raw(lambda) + pg.raw(lambda + shift)) / 3.0;
        EXPECT_NEAR(pg.smoothed(lambda, SmoothingFilter::uniform(1)), m1, 1e-12 * std::max(1.0, m1));
    }
}

TEST(Periodogram, ZeroPathIsNumericError) {
    const SampledPath zero(std::vector<double>(10, 0.0), 0.1, 1.5);
    EXPECT_THROW(self_normalized_periodogram(zero, 1.0), NumericError);
    const SampledField zf(std::vector<double>(9, 0.0), 3, 0.1, 1.5);
    EXPECT_THROW(periodogram_2d(zf, 1.0, 1.0), NumericError);
}

TEST(Periodogram2D, MatchesBruteForceAndGridVersion) {
    const std::size_t n = 8;
    const double delta = 0.3;
    const auto field = random_field(n, delta, 5);
    std::vector<double> u{-2.0, 0.0, 0.7, 5.5}, v{0.0, 1.1, -3.3};
    const auto grid = periodogram_2d_grid(field, u, v);
    for (std::size_t a = 0; a < u.size(); ++a)
        for (std::size_t b = 0; b < v.size(); ++b) {
            std::complex<long double> s = 0.0L;
            long double ss = 0.0L;
            for (std::size_t j1 = 0; j1 < n; ++j1)
                for (std::size_t j2 = 0; j2 < n; ++j2) {
                    const long double arg = ((j1 + 1) * u[a] + (j2 + 1) * v[b]) * static_cast<long double>(delta);
                    s += static_cast<long double>(field.at(j1, j2)) * std::complex<long double>(std::cos(arg), std::sin(arg));
                    ss += static_cast<long double>(field.at(j1, j2)) * field.at(j1, j2);
                }
            const double ref = static_cast<double>(std::norm(s) / ss);
            EXPECT_NEAR(periodogram_2d(field, u[a], v[b]), ref, 1e-10 * std::max(1.0, ref));
            EXPECT_NEAR(grid[a * v.size() + b], ref, 1e-10 * std::max(1.0, ref));
        }
}

TEST(Periodogram2D, OriginAndSeparableFactorisation) {
    const std::size_t n = 6;
    std::vector<double> a{1.0, -0.5, 2.0, 0.3, -1.2, 0.8}, b{0.4, 1.0, -2.5, 0.1, 0.9, -0.7};
    std::vector<double> outer(n * n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            outer[i * n + j] = a[i] * b[j];
            total += a[i] * b[j];
        }
    const SampledField field(outer, n, 0.2, 1.8);
    EXPECT_NEAR(periodogram_2d(field, 0.0, 0.0), total * total / field.sum_squares(), 1e-12);
    const SampledPath pa(a, 0.2, 1.8), pb(b, 0.2, 1.8);
    for (double l1 : {0.5, 4.0})
        for (double l2 : {-1.0, 2.5})
            EXPECT_NEAR(periodogram_2d(field, l1, l2),
                        self_normalized_periodogram(pa, l1) * self_normalized_periodogram(pb, l2), 1e-12);
}

TEST(Periodogram2D, SmoothedIsEvenAndBounded) {
    const auto field = random_field(10, 0.2, 6);
    const auto f = SmoothingFilter::uniform(1);
    for (double l1 : {0.0, 1.5, 6.0})
        for (double l2 : {0.3, -2.0}) {
            const double s = smoothed_periodogram_2d(field, l1, l2, f);
            EXPECT_NEAR(s, smoothed_periodogram_2d(field, -l1, -l2, f), 1e-12 * std::max(1.0, s));
            EXPECT_GE(s, 0.0);
            EXPECT_LE(s, 100.0 * (1.0 + 1e-12));
        }
}

TEST(FrequencyGrid, SymmetricNodes) {
    const auto g = FrequencyGrid::uniform(3.0, 6);
    ASSERT_EQ(g.lambdas.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(g.lambdas[i], -g.lambdas[6 - i]);
    EXPECT_THROW(FrequencyGrid::uniform(3.0, 5), DomainError);
}
