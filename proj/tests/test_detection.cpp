#include "byzattack/detection.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "byzattack/errors.hpp"
#include "oracles.hpp"

namespace byzattack {
namespace {

NominalModel reference_model() { return {Gaussian(2, 2.8), Gaussian(10, 3.1), 80.0}; }

AttackScenario reference_attack() {
  return {Gaussian(2, 2.8), Gaussian(10, 3.1), Gaussian(11.9985, 2.8218), Gaussian(0.3385, 6.3137), 0.4069};
}

}  // namespace

TEST(Llr, EqualLikelihoodPointIsZero) {
  const NominalModel m{Gaussian(-1, 2), Gaussian(3, 2), 1.0};
  const double x[] = {1.0};
  EXPECT_NEAR(llr_statistic(m, x), 0.0, 1e-14);
}

TEST(Llr, Additive) {
  const NominalModel m = reference_model();
  const double one[] = {4.2};
  const std::vector<double> many(7, 4.2);
  EXPECT_NEAR(llr_statistic(m, many), 7 * llr_statistic(m, one), 1e-12);
}

TEST(Llr, AtH1Mean) {
  const double x[] = {10.0};
  const double expected =
      std::log(oracle::normal_pdf(10, 3.1, 10.0)) - std::log(oracle::normal_pdf(2, 2.8, 10.0));
  EXPECT_NEAR(llr_statistic(reference_model(), x), expected, 1e-12);
  EXPECT_NEAR(llr_statistic(reference_model(), x), 11.377680081416457, 1e-10);
}

TEST(BinomialCi, NormalAndExactRegimes) {
  const double hw = binomial_ci_halfwidth(500, 10000);
  const double p = 0.05;
  EXPECT_NEAR(hw, 1.959964 * std::sqrt(p * (1 - p) / 10000) + 0.5 / 10000, 1e-6);
  // Zero events: exact upper limit 1 - 0.025^(1/n).
  EXPECT_NEAR(binomial_ci_halfwidth(0, 1000), 1 - std::pow(0.025, 1.0 / 1000), 1e-9);
  EXPECT_GT(binomial_ci_halfwidth(3, 1000), 0.0);
}

TEST(Spec, Validation) {
  DetectorSpec s;
  s.sensor_count = 0;
  EXPECT_THROW(validate(s), InvalidArgument);
  s.sensor_count = 1;
  s.trials = 0;
  EXPECT_THROW(validate(s), InvalidArgument);
  s.trials = 1;
  s.threshold = std::nan("");
  EXPECT_THROW(validate(s), InvalidArgument);
}

TEST(Simulation, IndependentOfWorkerCount) {
  DetectorSpec s;
  s.trials = 10000;
  s.stream = {5, 0};
  s.workers = 1;
  const auto one = simulate_statistics(reference_model(), reference_attack(), 0, s);
  s.workers = 3;
  const auto three = simulate_statistics(reference_model(), reference_attack(), 0, s);
  EXPECT_EQ(one, three);
}

TEST(Calibration, MedianAtHalf) {
  DetectorSpec s;
  s.trials = 20001;
  s.stream = {6, 0};
  auto stats = simulate_statistics(reference_model(), std::nullopt, 0, s);
  const ThresholdCalibration c = calibrate_threshold(reference_model(), std::nullopt, s, 0.5);
  std::nth_element(stats.begin(), stats.begin() + 10000, stats.end());
  EXPECT_NEAR(c.threshold, stats[10000], std::abs(stats[10000]) * 1e-3 + 1e-2);
}

TEST(Calibration, ExactExceedanceCount) {
  DetectorSpec s;
  s.trials = 100000;
  s.stream = {7, 0};
  const auto stats = simulate_statistics(reference_model(), std::nullopt, 0, s);
  const ThresholdCalibration c = calibrate_threshold(reference_model(), std::nullopt, s, 0.01);
  const auto above = std::count_if(stats.begin(), stats.end(), [&](double v) { return v > c.threshold; });
  EXPECT_EQ(above, 1000);
  EXPECT_FALSE(c.insufficient_trials);
}

TEST(Calibration, SelfConsistentOnFreshDraws) {
  DetectorSpec s;
  s.trials = 1000000;
  s.stream = {8, 0};
  const ThresholdCalibration c = calibrate_threshold(reference_model(), std::nullopt, s, 0.0004);
  s.threshold = c.threshold;
  s.stream = {8, 1};
  const ErrorEstimate e = simulate_error_probs(reference_model(), std::nullopt, s);
  EXPECT_NEAR(e.p_fa, 0.0004, 2 * e.ci_halfwidth_fa);
}

TEST(Calibration, MonotoneInTargetRate) {
  DetectorSpec s;
  s.trials = 50000;
  s.stream = {9, 0};
  double last = -std::numeric_limits<double>::infinity();
  for (double p : {0.5, 0.2, 0.1, 0.05, 0.01, 0.005}) {
    const double t = calibrate_threshold(reference_model(), std::nullopt, s, p).threshold;
    EXPECT_GE(t, last);
    last = t;
  }
}

TEST(Calibration, FlagsInsufficientTrials) {
  DetectorSpec s;
  s.trials = 10000;
  const ThresholdCalibration c = calibrate_threshold(reference_model(), std::nullopt, s, 0.0004);
  EXPECT_TRUE(c.insufficient_trials);
  EXPECT_GT(c.pfa_ci_halfwidth, 0.0);
}

TEST(Calibration, RejectsBadRate) {
  DetectorSpec s;
  EXPECT_THROW(calibrate_threshold(reference_model(), std::nullopt, s, 0.0), InvalidArgument);
  EXPECT_THROW(calibrate_threshold(reference_model(), std::nullopt, s, 1.0), InvalidArgument);
}

TEST(ErrorProbs, NoAttackMissesAlmostNever) {
  DetectorSpec s;
  s.trials = 200000;
  s.stream = {10, 0};
  s.threshold = calibrate_threshold(reference_model(), std::nullopt, s, 1e-3).threshold;
  s.stream = {10, 1};
  const ErrorEstimate e = simulate_error_probs(reference_model(), std::nullopt, s);
  EXPECT_LE(e.p_m, 1e-3 + e.ci_halfwidth_m);
  EXPECT_EQ(e.false_alarms + e.correct_rejections, s.trials);
  EXPECT_EQ(e.misses + e.detections, s.trials);
}

TEST(ErrorProbs, MinusInfinityAlwaysAlarms) {
  DetectorSpec s;
  s.trials = 1000;
  s.threshold = -std::numeric_limits<double>::infinity();
  const ErrorEstimate e = simulate_error_probs(reference_model(), reference_attack(), s);
  EXPECT_EQ(e.p_fa, 1.0);
  EXPECT_EQ(e.p_m, 0.0);
}

TEST(ErrorProbs, AttackDegradesDetection) {
  DetectorSpec s;
  s.trials = 50000;
  s.threshold = 0.0;
  const ErrorEstimate clean = simulate_error_probs(reference_model(), std::nullopt, s);
  const ErrorEstimate hit = simulate_error_probs(reference_model(), reference_attack(), s);
  EXPECT_GT(hit.p_fa + hit.p_m, clean.p_fa + clean.p_m);
}

TEST(ThresholdRule, RoundTrip) {
  for (auto r : {ThresholdRule::nominal_calibrated, ThresholdRule::attacked_calibrated, ThresholdRule::explicit_value})
    EXPECT_EQ(parse_threshold_rule(to_string(r)), r);
  EXPECT_EQ(to_string(ThresholdRule::attacked_calibrated), "attacked-calibrated");
  EXPECT_FALSE(parse_threshold_rule("median").has_value());
}

TEST(ExponentProbe, NoAttackApproachesKl) {
  DetectorSpec s;
  s.trials = 400000;
  s.stream = {12, 0};
  const ExponentProbe p = error_exponent_probe(reference_model(), std::nullopt, {1, 2, 3, 4}, 0.05, s);
  EXPECT_NEAR(p.reference_kl, 10.3251, 1e-3);
  ASSERT_EQ(p.points.size(), 4u);
  const ExponentPoint* last = nullptr;
  for (const ExponentPoint& e : p.points) {
    if (!e.exponent_is_lower_bound) last = &e;
  }
  ASSERT_NE(last, nullptr);
  EXPECT_GT(last->exponent, p.reference_kl / 2);
  EXPECT_LT(last->exponent, p.reference_kl * 2);
}

TEST(ExponentProbe, ZeroMissesAreLowerBounds) {
  DetectorSpec s;
  s.trials = 2000;
  const ExponentProbe p = error_exponent_probe(reference_model(), std::nullopt, {8}, 0.01, s);
  ASSERT_EQ(p.points.size(), 1u);
  EXPECT_EQ(p.points[0].p_m, 0.0);
  EXPECT_TRUE(p.points[0].exponent_is_lower_bound);
  EXPECT_NEAR(p.points[0].exponent, std::log(2000.0) / 8, 1e-12);
}

TEST(ExponentProbe, RejectsUnsortedGrid) {
  EXPECT_THROW(error_exponent_probe(reference_model(), std::nullopt, {3, 2}, 0.01, DetectorSpec{}), InvalidArgument);
}

}  // namespace byzattack
