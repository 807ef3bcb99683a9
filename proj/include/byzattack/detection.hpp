#pragma once

// Neyman-Pearson detection at the fusion center. The detector thresholds the
// summed NOMINAL log-likelihood ratio ln f1(x) - ln f0(x) over m sensors and
// decides H1 when the statistic exceeds the threshold. It does not know about
// the attack; the attack only changes the distribution of the received data.
//
// Trial t, sensor j uses draw index t*m + j of the hypothesis stream
// (stream.child(0) for H0, stream.child(1) for H1), so results do not depend
// on the number of worker threads.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "byzattack/divergence.hpp"
#include "byzattack/model.hpp"
#include "byzattack/random.hpp"

namespace byzattack {

struct DetectorSpec {
  std::size_t sensor_count = 10;
  double threshold = 0.0;
  std::size_t trials = 100000;
  SampleStream stream{};
  /// 0 = std::thread::hardware_concurrency().
  unsigned workers = 0;
};

void validate(const DetectorSpec& spec);

struct ErrorEstimate {
  double p_fa = 0.0;
  double p_m = 0.0;
  double ci_halfwidth_fa = 0.0;  // 95%
  double ci_halfwidth_m = 0.0;   // 95%
  std::size_t false_alarms = 0;
  std::size_t correct_rejections = 0;
  std::size_t misses = 0;
  std::size_t detections = 0;
};

/// Sum over samples of ln f1(x) - ln f0(x).
double llr_statistic(const NominalModel& model, std::span<const double> samples);

/// 95% half-width for a binomial proportion: normal approximation plus a
/// 0.5/n continuity term, switching to the exact Clopper-Pearson interval
/// (larger side) when fewer than 10 events are observed.
double binomial_ci_halfwidth(std::size_t events, std::size_t trials);

/// Statistic of every trial under one hypothesis; data come from the nominal
/// density, or from the attacked mixture when an attack is given.
std::vector<double> simulate_statistics(const NominalModel& model,
                                        const std::optional<AttackScenario>& attack, int hypothesis,
                                        const DetectorSpec& spec);

struct ThresholdCalibration {
  double threshold = 0.0;
  /// trials * target_pfa < 100: the empirical quantile rests on few exceedances.
  bool insufficient_trials = false;
  /// Widened (doubled) 95% half-width on the achieved false-alarm rate when
  /// insufficient_trials is set, the plain half-width otherwise.
  double pfa_ci_halfwidth = 0.0;
};

/// Empirical (1 - target_pfa) quantile of the H0 statistic (nominal f0, or the
/// attacked H0 mixture). Exactly floor(target_pfa * trials) calibration trials
/// lie strictly above the returned threshold when there are no ties.
ThresholdCalibration calibrate_threshold(const NominalModel& model,
                                         const std::optional<AttackScenario>& attack,
                                         const DetectorSpec& spec, double target_pfa);

/// p_fa = share of H0 trials with statistic > threshold, p_m = share of H1
/// trials with statistic <= threshold.
ErrorEstimate simulate_error_probs(const NominalModel& model,
                                   const std::optional<AttackScenario>& attack,
                                   const DetectorSpec& spec);

enum class ThresholdRule { nominal_calibrated, attacked_calibrated, explicit_value };
std::string_view to_string(ThresholdRule r);
std::optional<ThresholdRule> parse_threshold_rule(std::string_view name);

struct ExponentPoint {
  std::size_t m = 0;
  double threshold = 0.0;
  double p_m = 0.0;
  /// -ln(p_m)/m; when no miss was observed, -ln(1/trials)/m and
  /// exponent_is_lower_bound is set.
  double exponent = 0.0;
  bool exponent_is_lower_bound = false;
};

struct ExponentProbe {
  std::vector<ExponentPoint> points;
  /// Quadrature KL of the scenario for comparison against the exponents.
  double reference_kl = 0.0;
};

/// p_m versus sensor count at fixed target_pfa; thresholds are recalibrated
/// per m under the (possibly attacked) H0. The H1 trials use a stream derived
/// from spec.stream.child(2) so calibration and evaluation are independent.
ExponentProbe error_exponent_probe(const NominalModel& model,
                                   const std::optional<AttackScenario>& attack,
                                   const std::vector<std::size_t>& m_grid, double target_pfa,
                                   const DetectorSpec& spec);

}  // namespace byzattack
