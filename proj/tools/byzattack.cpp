// byzattack: batch driver for the attack optimizer, divergence estimators,
// detection simulator and solver self-validation.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "byzattack/cli/commands.hpp"
#include "byzattack/errors.hpp"

namespace {

using nlohmann::json;
using namespace byzattack::cli;

struct Overrides {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  double delta = 0.0;
  double alpha = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t K = 0;
  double target_pfa = 0.0;
  std::string threshold_rule;
  std::string threshold;
  std::vector<double> alpha_grid;
  std::map<std::string, CLI::Option*> given;
};

void add_common(CLI::App* sub, Overrides& o) {
  o.given["config"] = sub->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  o.given["seed"] = sub->add_option("--seed", o.seed, "master seed");
  o.given["out"] = sub->add_option("--out", o.out, "output path (default stdout)");
  o.given["format"] = sub->add_option("--format", o.format, "csv | json");
  o.given["delta"] = sub->add_option("--delta", o.delta, "energy budget");
  o.given["alpha"] = sub->add_option("--alpha", o.alpha, "fix alpha at this value");
  o.given["trials"] = sub->add_option("--trials", o.trials, "Monte Carlo trials per hypothesis");
  o.given["K"] = sub->add_option("--K", o.K, "samples for the Monte Carlo KL");
  o.given["target_pfa"] = sub->add_option("--target-pfa", o.target_pfa, "calibration false-alarm rate");
  o.given["threshold_rule"] =
      sub->add_option("--threshold-rule", o.threshold_rule, "nominal-calibrated | attacked-calibrated | explicit");
  o.given["threshold"] = sub->add_option("--threshold", o.threshold, "explicit threshold (number, inf, -inf)");
  o.given["alpha_grid"] = sub->add_option("--alpha-grid", o.alpha_grid, "alpha values for sweep")->delimiter(',');
}

bool given(const Overrides& o, const std::string& key) { return o.given.at(key)->count() > 0; }

json load_document(const Overrides& o) {
  json doc = json::object();
  if (given(o, "config")) {
    std::ifstream in(o.config_path);
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config", "top level must be an object");
  }
  if (given(o, "seed")) doc["seed"] = o.seed;
  if (given(o, "out")) doc["out"] = o.out;
  if (given(o, "format")) doc["format"] = o.format;
  if (given(o, "delta")) doc["delta"] = o.delta;
  if (given(o, "trials")) doc["trials"] = o.trials;
  if (given(o, "K")) doc["K"] = o.K;
  if (given(o, "target_pfa")) doc["target_pfa"] = o.target_pfa;
  if (given(o, "threshold_rule")) doc["threshold_rule"] = o.threshold_rule;
  if (given(o, "threshold")) {
    try {
      std::size_t used = 0;
      const double v = std::stod(o.threshold, &used);
      doc["threshold"] = used == o.threshold.size() ? json(v) : json(o.threshold);
    } catch (const std::exception&) {
      doc["threshold"] = o.threshold;
    }
  }
  if (given(o, "alpha_grid")) doc["alpha_grid"] = o.alpha_grid;
  if (given(o, "alpha")) {
    doc["fixed_alpha"] = o.alpha;
    if (doc.contains("attack_alpha")) doc["attack_alpha"] = o.alpha;
  }
  return doc;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

int run(const std::string& name, const Overrides& o) {
  const RunConfig cfg = parse_config(load_document(o));
  CommandOutput result;
  if (name == "optimize") {
    result = cmd_optimize(cfg);
  } else if (name == "evaluate") {
    result = cmd_evaluate(cfg);
  } else if (name == "sweep") {
    result = cmd_sweep(cfg);
  } else if (name == "simulate") {
    result = cmd_simulate(cfg);
  } else {
    result = cmd_validate(cfg);
  }

  if (cfg.out.empty()) {
    std::cout << result.artifact;
    if (!result.summary.empty()) std::cerr << result.summary;
  } else {
    write_text(cfg.out, result.artifact);
    if (!result.summary.empty()) write_text(cfg.out + ".summary.json", result.summary);
  }
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << '\n';
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case Byzantine attack design and detection simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "byzattack 1.0");

  // One override set per subcommand; std::map keeps the addresses stable.
  std::map<std::string, Overrides> overrides;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& [name, help] :
       {std::pair{"optimize", "coordinate descent for the worst-case attack"},
        std::pair{"evaluate", "KL divergence of a given attack under all estimators"},
        std::pair{"sweep", "minimal divergence versus attacker fraction alpha"},
        std::pair{"simulate", "detection error probabilities with and without attack"},
        std::pair{"validate", "property checks of the inner solver and estimators"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, overrides[name]);
    subs.emplace_back(name, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  std::string chosen;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) chosen = name;
  }

  try {
    return run(chosen, overrides.at(chosen));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const byzattack::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const byzattack::InfeasiblePoint& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
