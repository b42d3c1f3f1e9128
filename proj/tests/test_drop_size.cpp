#include "oracles.hpp"

#include "rainforge/drop_size.hpp"
#include "rainforge/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace rainforge;

namespace {

DropSizeDistribution mp(double intensity, double lo_mm = 0.5, double hi_mm = 5.0) {
    return marshall_palmer(RainIntensity{intensity}, DiameterRange::from_mm(lo_mm, hi_mm));
}

double quadrature_concentration(const DropSizeDistribution& dsd) {
    return oracle::adaptive_simpson([&](double d) { return dsd.a_coeff() * std::exp(-dsd.beta() * d); },
                                    dsd.range().d_min(), dsd.range().d_max(), 1e-12);
}

}  // namespace

TEST(MarshallPalmer, Beta) {
    EXPECT_DOUBLE_EQ(mp(1).beta(), 4100.0);
    EXPECT_NEAR(mp(50).beta(), 1802.9, 1802.9 * 1e-4);
    EXPECT_NEAR(mp(100).beta(), 4100.0 * std::pow(100.0, -0.21), 1e-9);
    EXPECT_DOUBLE_EQ(mp(25).a_coeff(), 8e6);
}

TEST(MarshallPalmer, BetaDecreasesWithIntensity) {
    double prev = mp(0.1).beta();
    for (double i = 0.2; i <= 500; i *= 1.3) {
        const double b = mp(i).beta();
        EXPECT_LT(b, prev);
        prev = b;
    }
}

TEST(NumberDensity, Examples) {
    const auto dsd = mp(1, 0.1, 10);
    EXPECT_DOUBLE_EQ(number_density(dsd, 0.0), 8e6);
    EXPECT_NEAR(number_density(dsd, 1e-3), 8e6 * std::exp(-4.1), 1e-9);
    EXPECT_NEAR(number_density(dsd, 1e-3), 1.3255e5, 1.3255e5 * 1e-3);
    EXPECT_THROW(number_density(dsd, -1e-3), domain_error);
}

TEST(TotalConcentration, MatchesQuadrature) {
    for (double i : {1.0, 5.0, 25.0, 50.0, 100.0}) {
        const auto dsd = mp(i);
        const double q = quadrature_concentration(dsd);
        EXPECT_NEAR(total_concentration(dsd), q, 1e-6 * q) << i;
    }
    const auto wide = mp(1, 0.1, 10);
    const double q = quadrature_concentration(wide);
    EXPECT_NEAR(total_concentration(wide), q, 1e-6 * q);
    EXPECT_NEAR(total_concentration(mp(50)), 1801.0, 1801.0 * 1e-3);
}

TEST(TotalConcentration, RandomDistributions) {
    std::mt19937_64 gen{11};
    std::uniform_real_distribution<double> a{1e5, 1e8}, beta{100, 1e4}, lo{0.05e-3, 2e-3}, w{0.1e-3, 8e-3};
    for (int i = 0; i < 50; ++i) {
        const double dmin = lo(gen);
        const double dmax = std::min(dmin + w(gen), 0.01);
        const DropSizeDistribution dsd{a(gen), beta(gen), DiameterRange{dmin, dmax}};
        const double q = quadrature_concentration(dsd);
        EXPECT_NEAR(total_concentration(dsd), q, 1e-6 * q);
    }
}

TEST(Cdf, EndpointsAndMedian) {
    const auto dsd = mp(1, 0.1, 10);
    EXPECT_DOUBLE_EQ(cdf(dsd, 0.1e-3), 0.0);
    EXPECT_DOUBLE_EQ(cdf(dsd, 10e-3), 1.0);
    EXPECT_NEAR(cdf(dsd, 0.26905e-3), 0.5, 1e-3);
    EXPECT_THROW(cdf(dsd, 0.05e-3), domain_error);
    EXPECT_THROW(cdf(dsd, 11e-3), domain_error);
}

TEST(Cdf, MatchesQuadratureRatio) {
    const auto dsd = mp(25);
    const double total = quadrature_concentration(dsd);
    for (double d = 0.6e-3; d < 5e-3; d += 0.37e-3) {
        const double part = oracle::adaptive_simpson(
            [&](double x) { return dsd.a_coeff() * std::exp(-dsd.beta() * x); }, dsd.range().d_min(), d, 1e-12);
        EXPECT_NEAR(cdf(dsd, d), part / total, 1e-9);
    }
}

TEST(InverseCdf, Examples) {
    const auto dsd = mp(1, 0.1, 10);
    EXPECT_DOUBLE_EQ(inverse_cdf(dsd, 0.0), 0.1e-3);
    EXPECT_DOUBLE_EQ(inverse_cdf(dsd, 1.0), 10e-3);
    const double median = oracle::bisect([&](double d) { return cdf(dsd, d); }, 0.1e-3, 10e-3, 0.5);
    EXPECT_NEAR(inverse_cdf(dsd, 0.5), median, median * 1e-4);
    EXPECT_NEAR(inverse_cdf(dsd, 0.5), 2.6905e-4, 2.6905e-4 * 1e-4);
    EXPECT_THROW(inverse_cdf(dsd, -0.01), domain_error);
    EXPECT_THROW(inverse_cdf(dsd, 1.01), domain_error);
    EXPECT_THROW(inverse_cdf(dsd, std::nan("")), domain_error);
}

TEST(InverseCdf, RoundTripAndMonotone) {
    std::mt19937_64 gen{3};
    std::uniform_real_distribution<double> intensity{0.5, 200}, lo{0.1, 2}, w{0.2, 8};
    for (int k = 0; k < 20; ++k) {
        const double dmin = lo(gen);
        const auto dsd = mp(intensity(gen), dmin, std::min(dmin + w(gen), 10.0));
        double prev = -1;
        for (int i = 0; i <= 1000; ++i) {
            const double u = i * 1e-3;
            const double d = inverse_cdf(dsd, u);
            EXPECT_NEAR(cdf(dsd, d), u, 1e-9);
            EXPECT_GT(d, prev);
            prev = d;
        }
    }
}

TEST(MeanDiameter, MatchesQuadrature) {
    for (double i : {1.0, 25.0, 100.0}) {
        const auto dsd = mp(i);
        const double ref = oracle::truncated_mean_by_quadrature(dsd.a_coeff(), dsd.beta(), dsd.range().d_min(),
                                                                dsd.range().d_max());
        EXPECT_NEAR(mean_diameter(dsd), ref, ref * 1e-9);
    }
}

TEST(SampleDiameters, EmptyAndDeterministic) {
    const auto dsd = mp(50);
    EXPECT_TRUE(sample_diameters(dsd, 1, 0).empty());
    EXPECT_EQ(sample_diameters(dsd, 42, 1000), sample_diameters(dsd, 42, 1000));
    EXPECT_NE(sample_diameters(dsd, 42, 1000), sample_diameters(dsd, 43, 1000));
    const auto xs = sample_diameters(dsd, 9, 100);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(xs[i], sample_diameter(dsd, 9, i));
}

TEST(SampleDiameters, KolmogorovSmirnovAndMean) {
    const auto dsd = mp(50);
    const auto xs = sample_diameters(dsd, 2024, 1'000'000);
    for (double d : xs) ASSERT_TRUE(dsd.range().contains(d));
    const double a = dsd.a_coeff(), beta = dsd.beta(), lo = dsd.range().d_min(), hi = dsd.range().d_max();
    const auto ref_cdf = [&](double d) {
        return (std::exp(-beta * lo) - std::exp(-beta * d)) / (std::exp(-beta * lo) - std::exp(-beta * hi));
    };
    EXPECT_LT(oracle::ks_statistic(xs, ref_cdf), 0.002);
    double sum = 0;
    for (double d : xs) sum += d;
    const double ref_mean = oracle::truncated_mean_by_quadrature(a, beta, lo, hi);
    EXPECT_NEAR(sum / xs.size(), ref_mean, 0.01 * ref_mean);
}

TEST(DropSizeDistribution, RejectsBadParameters) {
    const auto r = DiameterRange::default_range();
    EXPECT_THROW(DropSizeDistribution(0.0, 1000, r), validation_error);
    EXPECT_THROW(DropSizeDistribution(8e6, -1, r), validation_error);
    EXPECT_THROW(DropSizeDistribution(8e6, std::nan(""), r), validation_error);
}
