#include "byzattack/distributions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "byzattack/errors.hpp"
#include "oracles.hpp"

namespace byzattack {

TEST(Gaussian, RejectsBadParameters) {
  EXPECT_THROW(Gaussian(0.0, 0.0), InvalidArgument);
  EXPECT_THROW(Gaussian(0.0, -1.0), InvalidArgument);
  EXPECT_THROW(Gaussian(0.0, 1e-13), InvalidArgument);
  EXPECT_THROW(Gaussian(std::nan(""), 1.0), InvalidArgument);
  EXPECT_THROW(Gaussian(0.0, std::numeric_limits<double>::infinity()), InvalidArgument);
  EXPECT_NO_THROW(Gaussian(0.0, kMinVariance));
}

TEST(GaussianLogPdf, StandardNormal) {
  const Gaussian g(0.0, 1.0);
  EXPECT_NEAR(gaussian_log_pdf(g, 0.0), -0.9189385332046727, 1e-12);
  EXPECT_NEAR(gaussian_log_pdf(g, 1.0), -1.4189385332046727, 1e-12);
}

TEST(GaussianLogPdf, AtMeanMatchesOracle) {
  // -0.5 ln(2 pi 2.8)
  EXPECT_NEAR(gaussian_log_pdf(Gaussian(2.0, 2.8), 2.0), -1.4337482417952518, 1e-12);
}

TEST(GaussianLogPdf, FarTailStaysFinite) {
  const double v = gaussian_log_pdf(Gaussian(0.0, 1.0), 1e5);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, -0.5e10 - 0.9189385332046727, 1.0);
}

TEST(GaussianKl, BaselineNominals) {
  EXPECT_NEAR(gaussian_kl(Gaussian(2, 2.8), Gaussian(10, 3.1)), 10.3251, 1e-4);
  EXPECT_NEAR(gaussian_kl(Gaussian(10, 3.1), Gaussian(2, 2.8)), 11.43125, 1e-4);
}

TEST(GaussianKl, IdenticalIsZero) {
  EXPECT_EQ(gaussian_kl(Gaussian(-3.5, 0.7), Gaussian(-3.5, 0.7)), 0.0);
}

TEST(GaussianKl, MatchesOracleAndIsNonnegative) {
  UniformSequence u(SampleStream{9, 0});
  for (int i = 0; i < 500; ++i) {
    const double m0 = u.next(-10, 10), v0 = u.next(0.01, 20), m1 = u.next(-10, 10), v1 = u.next(0.01, 20);
    const double got = gaussian_kl(Gaussian(m0, v0), Gaussian(m1, v1));
    EXPECT_GE(got, 0.0);
    EXPECT_NEAR(got, oracle::gaussian_kl(m0, v0, m1, v1), 1e-10 * std::max(1.0, got));
  }
}

TEST(LogAddExp, Basics) {
  EXPECT_NEAR(log_add_exp(0.0, 0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(log_add_exp(-1000.0, -1000.0), -1000.0 + std::log(2.0), 1e-12);
  const double ninf = -std::numeric_limits<double>::infinity();
  EXPECT_EQ(log_add_exp(ninf, 3.0), 3.0);
  EXPECT_EQ(log_add_exp(ninf, ninf), ninf);
}

TEST(MixtureLogPdf, ZeroWeightIsNominal) {
  const GaussianMixture m(0.0, Gaussian(1, 2), Gaussian(50, 0.5));
  for (double x : {-3.0, 1.0, 7.5})
    EXPECT_DOUBLE_EQ(mixture_log_pdf(m, x), gaussian_log_pdf(Gaussian(1, 2), x));
}

TEST(MixtureLogPdf, IdenticalComponentsCollapse) {
  const Gaussian g(4, 3);
  for (double w : {0.1, 0.5, 0.9})
    EXPECT_NEAR(mixture_log_pdf(GaussianMixture(w, g, g), 2.2), gaussian_log_pdf(g, 2.2), 1e-14);
}

TEST(MixtureLogPdf, SymmetricMidpoint) {
  const GaussianMixture m(0.5, Gaussian(0, 1), Gaussian(4, 1));
  EXPECT_NEAR(mixture_log_pdf(m, 2.0), -2.9189385332046727, 1e-12);
}

TEST(MixtureLogPdf, MatchesDirectDensityAndSurvivesTails) {
  const GaussianMixture m(0.3, Gaussian(2, 2.8), Gaussian(12, 2.9));
  for (double x : {-5.0, 2.0, 7.0, 12.0, 20.0})
    EXPECT_NEAR(mixture_log_pdf(m, x), std::log(oracle::mixture_pdf(0.3, 2, 2.8, 12, 2.9, x)), 1e-12);
  // exp() underflows here, the log-space form must not.
  EXPECT_TRUE(std::isfinite(mixture_log_pdf(m, 500.0)));
}

TEST(GaussianMixture, RejectsWeightOutsideUnitInterval) {
  EXPECT_THROW(GaussianMixture(-0.1, Gaussian(0, 1), Gaussian(0, 1)), InvalidArgument);
  EXPECT_THROW(GaussianMixture(1.1, Gaussian(0, 1), Gaussian(0, 1)), InvalidArgument);
}

TEST(Sampling, GaussianMoments) {
  const auto xs = sample_gaussian(Gaussian(3.0, 4.0), SampleStream{2, 0}, 100000);
  double s = 0, q = 0;
  for (double x : xs) {
    s += x;
    q += x * x;
  }
  const double mean = s / xs.size();
  EXPECT_NEAR(mean, 3.0, 0.03);
  EXPECT_NEAR(q / xs.size() - mean * mean, 4.0, 0.08);
}

TEST(Sampling, MixtureWeightAndDeterminism) {
  const GaussianMixture m(0.25, Gaussian(-100, 1), Gaussian(100, 1));
  const SampleStream st{4, 2};
  const auto xs = sample_mixture(m, st, 40000);
  std::size_t attacked = 0;
  for (double x : xs) attacked += x > 0;
  EXPECT_NEAR(attacked / 40000.0, 0.25, 0.01);
  EXPECT_EQ(xs, sample_mixture(m, st, 40000));
  for (std::size_t i : {0u, 17u, 39999u}) EXPECT_EQ(mixture_draw(m, st, i), xs[i]);
}

TEST(Sampling, PrefixStable) {
  const auto longer = sample_gaussian(Gaussian(0, 1), SampleStream{8, 1}, 1000);
  const auto shorter = sample_gaussian(Gaussian(0, 1), SampleStream{8, 1}, 10);
  EXPECT_TRUE(std::equal(shorter.begin(), shorter.end(), longer.begin()));
}

}  // namespace byzattack
