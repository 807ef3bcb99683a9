#include "byzattack/cli/commands.hpp"

#include <sstream>

#include "byzattack/coordinate_descent.hpp"
#include "byzattack/detection.hpp"
#include "byzattack/divergence.hpp"
#include "byzattack/validation.hpp"

namespace byzattack::cli {

namespace {

using nlohmann::json;

// The output path is left out so an artifact does not depend on where it was
// written.
json artifact_config(const RunConfig& cfg) {
  json doc = to_json(cfg);
  doc.erase("out");
  return doc;
}

std::string csv_preamble(const RunConfig& cfg, const char* command) {
  std::ostringstream out;
  out << "# byzattack " << command << " schema_version=" << kSchemaVersion << " seed=" << cfg.seed
      << '\n';
  out << "# config=" << artifact_config(cfg).dump() << '\n';
  return out.str();
}

json json_envelope(const RunConfig& cfg, const char* command) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"seed", cfg.seed},
          {"config", artifact_config(cfg)}};
}

std::string csv_row(std::initializer_list<std::string> fields) {
  std::string row;
  bool first = true;
  for (const std::string& f : fields) {
    if (!first) row += ',';
    row += f;
    first = false;
  }
  row += '\n';
  return row;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json attack_json(const AttackScenario& s) {
  return {{"nu0", s.attacked0().mean()},   {"gamma0", s.attacked0().variance()},
          {"nu1", s.attacked1().mean()},   {"gamma1", s.attacked1().variance()},
          {"alpha", s.alpha()}};
}

json error_json(const ErrorEstimate& e) {
  return {{"p_fa", e.p_fa},
          {"ci_halfwidth_fa", e.ci_halfwidth_fa},
          {"p_m", e.p_m},
          {"ci_halfwidth_m", e.ci_halfwidth_m},
          {"false_alarms", e.false_alarms},
          {"correct_rejections", e.correct_rejections},
          {"misses", e.misses},
          {"detections", e.detections}};
}

/// The attack used by simulate: explicit in the config, else the optimizer's
/// result.
AttackScenario resolve_attack(const RunConfig& cfg, const NominalModel& model) {
  if (cfg.attack) return cfg.attack_scenario();
  const OptimizationTrace trace = coordinate_descent(model, cfg.solver);
  const TraceEntry& last = trace.final();
  return {model.h0, model.h1, Gaussian(last.psi.nu0, last.inner.gamma0),
          Gaussian(last.psi.nu1, last.inner.gamma1), last.psi.alpha};
}

}  // namespace

CommandOutput cmd_optimize(const RunConfig& cfg) {
  const NominalModel model = cfg.model();
  const OptimizationTrace trace = coordinate_descent(model, cfg.solver);
  const TraceEntry& last = trace.final();

  json summary = json_envelope(cfg, "optimize");
  summary["final"] = {{"nu0", last.psi.nu0},       {"nu1", last.psi.nu1},
                      {"alpha", last.psi.alpha},   {"gamma0", last.inner.gamma0},
                      {"gamma1", last.inner.gamma1}, {"f_star", last.f_star},
                      {"active_constraints", last.inner.active_constraints.to_string()}};
  summary["energy_used"] = injection_energy(model, last.psi, last.inner.gamma0, last.inner.gamma1);
  summary["delta"] = model.delta;
  summary["converged"] = trace.converged;
  summary["stop_reason"] = std::string(to_string(trace.stop_reason));
  summary["iterations"] = last.k;
  summary["evaluations"] = trace.evaluations;

  CommandOutput out;
  if (cfg.format == OutputFormat::json) {
    json rows = json::array();
    for (const TraceEntry& e : trace.iterations) {
      rows.push_back({{"k", e.k},
                      {"nu0", e.psi.nu0},
                      {"nu1", e.psi.nu1},
                      {"alpha", e.psi.alpha},
                      {"gamma0", e.inner.gamma0},
                      {"gamma1", e.inner.gamma1},
                      {"f_star", e.f_star}});
    }
    summary["trace"] = std::move(rows);
    out.artifact = dump(summary);
    return out;
  }

  std::string csv = csv_preamble(cfg, "optimize");
  csv += "k,nu0,nu1,alpha,gamma0,gamma1,f_star\n";
  for (const TraceEntry& e : trace.iterations) {
    csv += csv_row({std::to_string(e.k), format_double(e.psi.nu0), format_double(e.psi.nu1),
                    format_double(e.psi.alpha), format_double(e.inner.gamma0),
                    format_double(e.inner.gamma1), format_double(e.f_star)});
  }
  out.artifact = std::move(csv);
  out.summary = dump(summary);
  return out;
}

CommandOutput cmd_evaluate(const RunConfig& cfg) {
  const AttackScenario scenario = cfg.attack_scenario();
  DivergenceOptions options;
  options.mc_samples = cfg.K;
  options.stream = SampleStream{cfg.seed, 0};
  options.quadrature_nodes = cfg.quadrature_nodes;

  std::vector<DivergenceValue> rows;
  for (DivergenceMethod m : {DivergenceMethod::gaussian_approx, DivergenceMethod::upper_bound,
                             DivergenceMethod::monte_carlo, DivergenceMethod::quadrature}) {
    rows.push_back(evaluate_divergence(m, scenario, options));
  }

  CommandOutput out;
  if (cfg.format == OutputFormat::json) {
    json doc = json_envelope(cfg, "evaluate");
    doc["attack"] = attack_json(scenario);
    json list = json::array();
    for (const auto& r : rows) {
      list.push_back({{"method", std::string(to_string(r.method))},
                      {"value", r.value},
                      {"std_error", r.std_error}});
    }
    doc["rows"] = std::move(list);
    out.artifact = dump(doc);
    return out;
  }
  std::string csv = csv_preamble(cfg, "evaluate");
  csv += "method,value,std_error\n";
  for (const auto& r : rows) {
    csv += csv_row({std::string(to_string(r.method)), format_double(r.value), format_double(r.std_error)});
  }
  out.artifact = std::move(csv);
  return out;
}

CommandOutput cmd_sweep(const RunConfig& cfg) {
  const std::vector<SweepPoint> curve = alpha_sweep(cfg.model(), cfg.alpha_grid, cfg.solver);
  CommandOutput out;
  if (cfg.format == OutputFormat::json) {
    json doc = json_envelope(cfg, "sweep");
    json rows = json::array();
    for (const SweepPoint& p : curve) {
      rows.push_back({{"alpha", p.alpha},
                      {"f_star", p.f_star_min},
                      {"nu0", p.psi.nu0},
                      {"nu1", p.psi.nu1},
                      {"gamma0", p.inner.gamma0},
                      {"gamma1", p.inner.gamma1}});
    }
    doc["rows"] = std::move(rows);
    out.artifact = dump(doc);
    return out;
  }
  std::string csv = csv_preamble(cfg, "sweep");
  csv += "alpha,f_star\n";
  for (const SweepPoint& p : curve) {
    csv += csv_row({format_double(p.alpha), format_double(p.f_star_min)});
  }
  out.artifact = std::move(csv);
  return out;
}

CommandOutput cmd_simulate(const RunConfig& cfg) {
  const NominalModel model = cfg.model();
  const AttackScenario attack = resolve_attack(cfg, model);

  DetectorSpec spec;
  spec.sensor_count = cfg.sensor_count;
  spec.trials = cfg.trials;
  spec.stream = SampleStream{cfg.seed, 0};

  CommandOutput out;
  bool insufficient = false;
  switch (cfg.threshold_rule) {
    case ThresholdRule::explicit_value:
      spec.threshold = cfg.threshold;
      break;
    case ThresholdRule::nominal_calibrated:
    case ThresholdRule::attacked_calibrated: {
      const std::optional<AttackScenario> h0_model =
          cfg.threshold_rule == ThresholdRule::attacked_calibrated ? std::optional(attack) : std::nullopt;
      const ThresholdCalibration cal = calibrate_threshold(model, h0_model, spec, cfg.target_pfa);
      spec.threshold = cal.threshold;
      insufficient = cal.insufficient_trials;
      break;
    }
  }
  if (insufficient) {
    out.warnings.push_back("trials * target_pfa < 100: threshold rests on few calibration exceedances");
  }

  // Evaluation draws are independent of the calibration draws.
  spec.stream = SampleStream{cfg.seed, 1};
  const ErrorEstimate clean = simulate_error_probs(model, std::nullopt, spec);
  const ErrorEstimate attacked = simulate_error_probs(model, attack, spec);
  const std::string warning = out.warnings.empty() ? "" : out.warnings.front();

  if (cfg.format == OutputFormat::json) {
    json doc = json_envelope(cfg, "simulate");
    doc["threshold_rule"] = std::string(to_string(cfg.threshold_rule));
    doc["threshold"] = json_number(spec.threshold);
    doc["target_pfa"] = cfg.target_pfa;
    doc["sensor_count"] = cfg.sensor_count;
    doc["trials"] = cfg.trials;
    doc["attack"] = attack_json(attack);
    doc["no_attack"] = error_json(clean);
    doc["attacked"] = error_json(attacked);
    doc["warning"] = warning.empty() ? json(nullptr) : json(warning);
    out.artifact = dump(doc);
    return out;
  }
  std::string csv = csv_preamble(cfg, "simulate");
  csv += "case,threshold_rule,threshold,p_fa,ci_halfwidth_fa,p_m,ci_halfwidth_m,warning\n";
  const std::string rule(to_string(cfg.threshold_rule));
  for (const auto& [name, e] : {std::pair<const char*, const ErrorEstimate&>{"no_attack", clean},
                                std::pair<const char*, const ErrorEstimate&>{"attacked", attacked}}) {
    csv += csv_row({name, rule, format_double(spec.threshold), format_double(e.p_fa),
                    format_double(e.ci_halfwidth_fa), format_double(e.p_m),
                    format_double(e.ci_halfwidth_m), insufficient ? "insufficient_trials" : ""});
  }
  out.artifact = std::move(csv);
  return out;
}

CommandOutput cmd_validate(const RunConfig& cfg, InnerSolverFn solver) {
  ValidationOptions options;
  options.seed = cfg.seed;
  options.oracle_resolution = cfg.oracle_resolution;
  options.solver_trials = cfg.solver_trials;
  options.solver = std::move(solver);
  const ValidationReport report = run_validation(options);

  json doc = json_envelope(cfg, "validate");
  doc["passed"] = report.all_passed();
  json props = json::array();
  for (const PropertyResult& p : report.properties) {
    json entry = {{"name", p.name}, {"trials", p.trials}, {"passed", p.passed}, {"ok", p.ok}};
    if (!p.ok) entry["counterexample"] = p.counterexample;
    props.push_back(std::move(entry));
  }
  doc["properties"] = std::move(props);

  CommandOutput out;
  out.artifact = dump(doc);
  if (!report.all_passed()) {
    out.exit_code = kExitFailure;
    for (const PropertyResult& p : report.properties) {
      if (!p.ok) out.warnings.push_back("property failed: " + p.name + " (" + p.counterexample + ")");
    }
  }
  return out;
}

}  // namespace byzattack::cli
