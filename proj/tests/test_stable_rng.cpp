#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "sasma/sasma.hpp"

using namespace sasma;

namespace {

// Asymptotic Kolmogorov critical value at level 0.01.
constexpr double ks_critical_01 = 1.6276;

template <class Cdf>
double ks_statistic(std::vector<double> x, Cdf cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST(RngStream, SameKeyReproducesDistinctStreamsDiffer) {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    const auto xa = sample_sas(StableLaw::symmetric(1.5), 100, a);
    const auto xb = sample_sas(StableLaw::symmetric(1.5), 100, b);
    const auto xc = sample_sas(StableLaw::symmetric(1.5), 100, c);
    EXPECT_EQ(xa, xb);
    EXPECT_NE(xa, xc);
}

TEST(SampleSas, GaussianCaseHasVarianceTwoAndNormalKurtosis) {
    RngStream rng(11, 0);
    const auto x = sample_sas(StableLaw::symmetric(2.0), 1'000'000, rng);
    const double v = variance(x);
    EXPECT_NEAR(v, 2.0, 0.02);
    const double m = mean(x);
    double m4 = 0.0;
    for (double y : x) m4 += std::pow(y - m, 4);
    m4 /= static_cast<double>(x.size());
    const double kurt = m4 / (v * v);
    // Three standard errors of the sample kurtosis, sqrt(24 / n).
    EXPECT_NEAR(kurt, 3.0, 3.0 * std::sqrt(24.0 / 1e6));
}

TEST(SampleSas, CauchyUpperQuartileIsOne) {
    RngStream rng(12, 0);
    const auto x = sample_sas(StableLaw::symmetric(1.0), 1'000'000, rng);
    EXPECT_NEAR(empirical_quantile(x, 0.75), 1.0, 0.005);
}

TEST(SampleSas, ZeroScaleGivesZeros) {
    RngStream rng(1, 0);
    for (double v : sample_sas(StableLaw::symmetric(1.3, 0.0), 1000, rng)) EXPECT_EQ(v, 0.0);
}

TEST(SampleSas, ScaleIsExactlyMultiplicative) {
    RngStream a(5, 3), b(5, 3);
    const auto unit = sample_sas(StableLaw::symmetric(0.8, 1.0), 1000, a);
    const auto scaled = sample_sas(StableLaw::symmetric(0.8, 3.25), 1000, b);
    for (std::size_t i = 0; i < unit.size(); ++i) EXPECT_EQ(scaled[i], 3.25 * unit[i]);
}

TEST(SampleSas, RejectsInvalidParameters) {
    RngStream rng(1, 0);
    EXPECT_THROW(sample_sas(StableLaw{}, 0, rng), DomainError);
    EXPECT_THROW(StableLaw(0.0, 0.0, 1.0), DomainError);
    EXPECT_THROW(StableLaw(2.1, 0.0, 1.0), DomainError);
    EXPECT_THROW(StableLaw(1.5, 0.0, -1.0), DomainError);
    EXPECT_THROW(StableLaw(2.0, 0.5, 1.0), DomainError);
    EXPECT_THROW(StableLaw(1.5, 1.5, 1.0), DomainError);
}

class SasKolmogorov : public ::testing::TestWithParam<double> {};

TEST_P(SasKolmogorov, DrawsMatchIndependentCdf) {
    const double alpha = GetParam();
    RngStream rng(2024, static_cast<std::uint64_t>(alpha * 100));
    const auto x = sample_sas(StableLaw::symmetric(alpha), 20'000, rng);
    const double d = ks_statistic(x, [&](double v) { return sas_cdf(v, alpha); });
    EXPECT_LT(d * std::sqrt(20'000.0), ks_critical_01) << "alpha=" << alpha;
}

INSTANTIATE_TEST_SUITE_P(Alphas, SasKolmogorov, ::testing::Values(0.5, 1.0, 1.5, 1.9));

TEST(SasCdf, ClosedFormsAndSymmetry) {
    EXPECT_NEAR(sas_cdf(1.0, 1.0), 0.75, 1e-14);
    EXPECT_NEAR(sas_cdf(0.0, 1.3), 0.5, 1e-12);
    // alpha = 2 is N(0, 2).
    EXPECT_NEAR(sas_cdf(1.0, 2.0), 0.5 * std::erfc(-1.0 / 2.0), 1e-12);
    for (double x : {0.3, 1.7, 4.0}) EXPECT_NEAR(sas_cdf(x, 1.4) + sas_cdf(-x, 1.4), 1.0, 1e-10);
    // Continuity of the integral representation across alpha = 1.
    EXPECT_NEAR(sas_cdf(1.0, 1.0 - 1e-6), 0.75, 1e-5);
    EXPECT_NEAR(sas_cdf(1.0, 1.0 + 1e-6), 0.75, 1e-5);
}

TEST(StableQuartile, MatchesIndependentReferenceValues) {
    // Upper quartiles of S_alpha(1, 0, 0) computed with scipy.stats.levy_stable.
    EXPECT_NEAR(stable_quartile(1.0), 1.0, 1e-10);
    EXPECT_NEAR(stable_quartile(2.0), 0.95387255, 1e-4);
    EXPECT_NEAR(stable_quartile(0.7), 1.09006422, 1e-4);
    EXPECT_NEAR(stable_quartile(1.3), 0.97637894, 1e-4);
    EXPECT_NEAR(stable_quartile(1.7), 0.96273786, 1e-4);
}

TEST(StableQuartile, ContinuousInAlpha) {
    double prev = stable_quartile(0.7);
    for (int i = 1; i < 50; ++i) {
        const double a = 0.7 + 1.3 * i / 49.0;
        const double q = stable_quartile(a);
        EXPECT_LT(std::abs(q - prev), 0.05) << "alpha=" << a;
        prev = q;
    }
}

TEST(SkewedStable, BetaZeroCoincidesWithSymmetric) {
    RngStream a(9, 1), b(9, 1);
    EXPECT_EQ(sample_skewed_stable(StableLaw(1.3, 0.0, 2.0), 500, a), sample_sas(StableLaw::symmetric(1.3, 2.0), 500, b));
}

TEST(SkewedStable, PositiveBetaHasHeavierRightTail) {
    RngStream rng(10, 0);
    const auto x = sample_skewed_stable(StableLaw(1.3, 0.7, 1.0), 1'000'000, rng);
    const auto right = std::count_if(x.begin(), x.end(), [](double v) { return v > 10.0; });
    const auto left = std::count_if(x.begin(), x.end(), [](double v) { return v < -10.0; });
    EXPECT_GT(right, 2 * left);
}

TEST(SkewedStable, TotallyLeftSkewedBelowOneIsNonpositive) {
    RngStream rng(10, 1);
    const auto x = sample_skewed_stable(StableLaw(0.7, -1.0, 1.0), 100'000, rng);
    EXPECT_LE(*std::max_element(x.begin(), x.end()), 0.0);
}

TEST(GammaIncrement, MomentsAndPositivity) {
    RngStream rng(3, 0);
    const auto x = sample_gamma_increment(2.5, 1'000'000, rng);
    EXPECT_NEAR(mean(x), 2.5, 0.025);
    EXPECT_NEAR(variance(x) / 2.5, 1.0, 0.02);
    const auto y = sample_gamma_increment(1.0, 1'000'000, rng);
    EXPECT_NEAR(mean(y), 1.0, 0.01);
    const auto z = sample_gamma_increment(0.01, 1'000'000, rng);
    EXPECT_GT(*std::min_element(z.begin(), z.end()), 0.0);
    EXPECT_THROW(sample_gamma_increment(0.0, 1, rng), DomainError);
}

TEST(TruncatedLevy, IntensityMatchesQuadrature) {
    const LevyDensityParams params{1.0, 2.0, 2.1, 2.7, 0.1};
    const TruncatedLevySampler sampler(params);
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto tail = [](double c, double p, double eps) {
        auto h = [&](double x) { return c * std::abs(std::log(x)) / std::pow(x, p); };
        return GK::integrate(h, eps, 1.0, 15, 1e-13) + GK::integrate(h, 1.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
    };
    EXPECT_NEAR(sampler.total_intensity(), tail(1.0, 2.1, 0.1) + tail(2.0, 2.7, 0.1), 1e-8);
    auto first = [](double c, double p, double eps) {
        return GK::integrate([&](double x) { return c * x * std::abs(std::log(x)) / std::pow(x, p); }, eps, 1.0, 15, 1e-13);
    };
    EXPECT_NEAR(sampler.drift_rate(), first(1.0, 2.1, 0.1) - first(2.0, 2.7, 0.1), 1e-8);
}

TEST(TruncatedLevy, JumpCountsArePoisson) {
    const LevyDensityParams params{1.0, 1.0, 2.5, 2.5, 0.1};
    const TruncatedLevySampler sampler(params);
    const double dt = 0.01;
    const double mu = dt * sampler.total_intensity();
    const std::size_t draws = 200'000;
    RngStream rng(4, 0);
    std::vector<double> counts(5, 0.0);
    for (std::size_t i = 0; i < draws; ++i) {
        std::size_t k = 0;
        sampler.draw(dt, rng, &k);
        counts[std::min<std::size_t>(k, 4)] += 1.0;
    }
    const boost::math::poisson_distribution<> pois(mu);
    double chi2 = 0.0;
    double rest = 1.0;
    for (std::size_t k = 0; k < 5; ++k) {
        const double p = k < 4 ? boost::math::pdf(pois, static_cast<double>(k)) : rest;
        rest -= p;
        const double expected = p * draws;
        chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    EXPECT_LT(chi2, boost::math::quantile(boost::math::chi_squared(4.0), 0.99)) << "mu=" << mu;
}

TEST(TruncatedLevy, SymmetricIncrementsAreSymmetricAndCentred) {
    RngStream rng(6, 0);
    const LevyDensityParams params{1.0, 1.0, 2.5, 2.5, 0.1};
    const auto x = sample_trunc_levy_increment(params, 0.01, 200'000, rng);
    std::vector<double> reflected(x.size());
    std::transform(x.begin(), x.end(), reflected.begin(), [](double v) { return -v; });
    EXPECT_LT(two_sample_ks(x, reflected), ks_critical_01 * std::sqrt(2.0 / 200'000.0));
    EXPECT_NEAR(mean(x), 0.0, 0.01);
}

TEST(TruncatedLevy, IncrementsVanishForSmallDt) {
    RngStream rng(6, 1);
    const auto y = sample_trunc_levy_increment(LevyDensityParams{}, 1e-8, 100'000, rng);
    const auto zeros = std::count(y.begin(), y.end(), 0.0);
    EXPECT_GT(static_cast<double>(zeros) / 1e5, 0.999);
}

TEST(TruncatedLevy, RejectsInvalidParameters) {
    RngStream rng(1, 0);
    EXPECT_THROW(sample_trunc_levy_increment(LevyDensityParams{1.0, 1.0, 0.8, 2.5, 0.01}, 0.1, 1, rng), DomainError);
    EXPECT_THROW(sample_trunc_levy_increment(LevyDensityParams{-1.0, 1.0, 2.5, 2.5, 0.01}, 0.1, 1, rng), DomainError);
    EXPECT_THROW(sample_trunc_levy_increment(LevyDensityParams{1.0, 1.0, 2.5, 2.5, 0.0}, 0.1, 1, rng), DomainError);
    EXPECT_THROW(sample_trunc_levy_increment(LevyDensityParams{}, 0.0, 1, rng), DomainError);
}

TEST(LePage, ConstantAtOneAndContinuity) {
    EXPECT_NEAR(lepage_constant(1.0), std::sqrt(2.0 / std::numbers::pi), 1e-15);
    EXPECT_NEAR(lepage_constant(1.0 - 1e-6), lepage_constant(1.0), 1e-5);
    EXPECT_NEAR(lepage_constant(1.0 + 1e-6), lepage_constant(1.0), 1e-5);
    EXPECT_THROW(lepage_constant(2.0), DomainError);
}

TEST(LePage, ZeroSectionGivesZero) {
    RngStream rng(1, 0);
    const auto r = lepage_stable_integral(1.5, 3, [](std::size_t, double) { return 0.0; }, 0.0, 1.0, 1000, rng);
    for (double v : r.values) EXPECT_EQ(v, 0.0);
}

TEST(LePage, IndicatorIntegralMatchesDirectSampler) {
    const double alpha = 1.5, delta = 0.1;
    const std::size_t reps = 5000;
    RngStream series_rng(77, 0), direct_rng(77, 1);
    std::vector<double> series(reps);
    for (auto& v : series)
        v = lepage_stable_integral(alpha, 1, [](std::size_t, double) { return 1.0; }, 0.0, delta, 10'000, series_rng)
                .values[0];
    const auto direct = sample_sas(StableLaw::symmetric(alpha, std::pow(delta, 1.0 / alpha)), reps, direct_rng);
    const double d = two_sample_ks(series, direct);
    EXPECT_LT(d, ks_critical_01 * std::sqrt(2.0 / reps));
}
