#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "presym/app.hpp"

using presym::app::Command;
using presym::app::RunConfig;

namespace {

void common_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--problem", cfg.problem_path, "problem file")->required();
  sub->add_option("--seed", cfg.seed, "master seed");
  sub->add_option("--box", cfg.boxes, "sampling box override, name=lo,hi (repeatable)");
}

void ladder_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--samples", cfg.samples, "feasible samples per tangency step")->capture_default_str();
  sub->add_option("--zero-tol", cfg.zero_tol, "vanishing tolerance on sampled sets")->capture_default_str();
  sub->add_option("--max-levels", cfg.max_levels, "ladder depth limit")->capture_default_str();
}

void symmetry_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--trials", cfg.symmetry_trials, "sample points per symmetry residual")->capture_default_str();
  sub->add_option("--sym-tol", cfg.symmetry_tol, "symmetry residual tolerance")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Presymplectic analysis of optimal control problems"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string out_path;

  auto* analyze = app.add_subcommand("analyze", "regularity and constraint ladder (JSON)");
  common_flags(analyze, cfg);
  ladder_flags(analyze, cfg);
  analyze->add_option("--regularity-trials", cfg.regularity_trials, "samples for the rank of W")
      ->capture_default_str();

  auto* symmetries = app.add_subcommand("symmetries", "verify symmetry generators (JSON)");
  common_flags(symmetries, cfg);
  symmetry_flags(symmetries, cfg);

  auto* reduce = app.add_subcommand("reduce", "momentum level set dimensions (JSON)");
  common_flags(reduce, cfg);
  ladder_flags(reduce, cfg);
  symmetry_flags(reduce, cfg);
  reduce->add_option("--mu", cfg.mu, "auto, or comma-separated momentum values")->capture_default_str();
  reduce->add_option("--restrict", cfg.restrict_to, "none | ladder")->capture_default_str();
  reduce->add_option("--level-samples", cfg.level_samples, "points on the level set")->capture_default_str();

  auto* integrate = app.add_subcommand("integrate", "RK4 extremal flow with monitors (CSV)");
  common_flags(integrate, cfg);
  ladder_flags(integrate, cfg);
  integrate->add_option("--from", cfg.from, "auto, or comma-separated q,p,u values")->capture_default_str();
  integrate->add_option("--t0", cfg.t0)->capture_default_str();
  integrate->add_option("--t1", cfg.t1)->capture_default_str();
  integrate->add_option("--step", cfg.step)->capture_default_str();
  integrate->add_option("--retraction", cfg.retraction, "auto | on | off")->capture_default_str();
  integrate->add_option("--gauge", cfg.gauge, "error | zero")->capture_default_str();
  integrate->add_option("--every", cfg.record_every, "record every Nth step")->capture_default_str();

  for (auto* sub : {analyze, symmetries, reduce, integrate})
    sub->add_option("--out", out_path, "write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : presym::app::kInputError;
  }

  if (analyze->parsed()) cfg.command = Command::Analyze;
  if (symmetries->parsed()) cfg.command = Command::Symmetries;
  if (reduce->parsed()) cfg.command = Command::Reduce;
  if (integrate->parsed()) cfg.command = Command::Integrate;

  auto result = presym::app::run(cfg);
  if (!result.error.empty()) std::cerr << "presym-oc: " << result.error << '\n';
  if (!result.output.empty()) {
    if (out_path.empty()) {
      std::cout << result.output;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) {
        std::cerr << "presym-oc: cannot write '" << out_path << "'\n";
        return presym::app::kInputError;
      }
      f << result.output;
    }
  }
  return result.exit_code;
}
