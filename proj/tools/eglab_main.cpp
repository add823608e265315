// eglab — command-line front end: certify monotonicity classes, run the
// extragradient iteration, analyze the step-size bound polynomial, and
// reproduce the canned scenarios. Exit codes: 0 = ran, 1 = config error,
// 2 = internal numeric failure. Divergence is a finding, not a failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eglab/experiment.hpp"

namespace {

void apply_overrides(eglab::ExperimentConfig& cfg,
                     const std::optional<std::uint64_t>& seed,
                     const std::string& out_dir, const std::string& format) {
  if (seed) cfg.seed = *seed;
  if (!out_dir.empty()) cfg.outputs.dir = out_dir;
  if (format == "csv") {
    cfg.outputs.write_csv = true;
    cfg.outputs.write_json = false;
  } else if (format == "json") {
    cfg.outputs.write_csv = false;
    cfg.outputs.write_json = true;
  }
}

eglab::OutputSpec make_outputs(const std::string& out_dir,
                               const std::string& format) {
  eglab::OutputSpec outputs;
  if (!out_dir.empty()) outputs.dir = out_dir;
  if (format == "csv") outputs.write_json = false;
  if (format == "json") outputs.write_csv = false;
  return outputs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extragradient laboratory for hypomonotone operators"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format, repro_case;
  std::optional<std::uint64_t> seed;
  double mu = -1.0, lipschitz = -1.0, gamma_max = 1.0;
  int grid_size = 1000;
  bool mu_given = false, lip_given = false;

  auto add_common = [&](CLI::App* cmd, bool with_config_required) {
    auto* opt = cmd->add_option("--config", config_path,
                                "experiment configuration (JSON)");
    if (with_config_required) opt->required();
    cmd->add_option("--out", out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", seed, "sampling / construction seed");
    cmd->add_option("--format", format, "restrict outputs to csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* classify = app.add_subcommand(
      "classify", "certify the monotonicity class of the configured operator");
  add_common(classify, true);

  auto* solve = app.add_subcommand(
      "solve", "run the extragradient iteration and emit trajectory + report");
  add_common(solve, true);

  auto add_constants = [&](CLI::App* cmd) {
    cmd->add_option("--mu", mu, "hypomonotonicity modulus")
        ->each([&](const std::string&) { mu_given = true; });
    cmd->add_option("--lipschitz", lipschitz, "Lipschitz constant")
        ->each([&](const std::string&) { lip_given = true; });
    cmd->add_option("--gamma-max", gamma_max, "right end of the step-size range");
    cmd->add_option("--grid", grid_size, "number of sweep grid points");
  };

  auto* analyze = app.add_subcommand(
      "analyze",
      "sign changes, roots, Rouché radius and contractive intervals of the "
      "step polynomial");
  add_common(analyze, false);
  add_constants(analyze);

  auto* sweep = app.add_subcommand(
      "sweep", "tabulate q, P and the amplification witness over a step grid");
  add_common(sweep, false);
  add_constants(sweep);

  auto* reproduce = app.add_subcommand(
      "reproduce", "run a canned scenario end-to-end with fixed seeds");
  reproduce->add_option("case", repro_case, "scenario name")->required();
  reproduce->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) {
      auto cfg = eglab::load_config(config_path);
      apply_overrides(cfg, seed, out_dir, format);
      return eglab::cmd_classify(cfg, std::cout);
    }
    if (solve->parsed()) {
      auto cfg = eglab::load_config(config_path);
      apply_overrides(cfg, seed, out_dir, format);
      return eglab::cmd_solve(cfg, std::cout);
    }
    if (analyze->parsed() || sweep->parsed()) {
      if (!config_path.empty()) {
        // Derive constants from the configured operator unless overridden.
        auto cfg = eglab::load_config(config_path);
        apply_overrides(cfg, seed, out_dir, format);
        if (!mu_given || !lip_given) {
          const auto op = eglab::build_operator(cfg.op, cfg.seed);
          if (cfg.analysis.certified) {
            if (!op.linear)
              throw eglab::config_error(
                  "analysis 'certified' requires a linear operator");
            const auto report = eglab::classify_linear(*op.linear);
            if (!mu_given) mu = report.hypo_modulus;
            if (!lip_given) lipschitz = report.lipschitz;
          } else {
            if (!mu_given && cfg.analysis.mu) mu = *cfg.analysis.mu;
            if (!lip_given && cfg.analysis.lipschitz)
              lipschitz = *cfg.analysis.lipschitz;
          }
        }
      }
      if (mu < 0.0 || lipschitz < 0.0)
        throw eglab::config_error(
            "analyze/sweep need --mu and --lipschitz (or a --config that "
            "provides them)");
      const auto outputs = make_outputs(out_dir, format);
      return analyze->parsed()
                 ? eglab::cmd_analyze(mu, lipschitz, gamma_max, grid_size,
                                      outputs, std::cout)
                 : eglab::cmd_sweep(mu, lipschitz, gamma_max, grid_size,
                                    outputs, std::cout);
    }
    if (reproduce->parsed()) {
      eglab::OutputSpec outputs;
      if (!out_dir.empty()) outputs.dir = out_dir;
      return eglab::cmd_reproduce(repro_case, outputs, std::cout);
    }
  } catch (const eglab::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const eglab::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
