#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "geoboot/config.hpp"
#include "geoboot/error.hpp"
#include "geoboot/pipeline.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  bool resume = false;
  bool strict_config = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "config file (JSON)")
      ->required();
  cmd->add_option("--out", opts.out_dir, "run directory")->required();
  cmd->add_option("--seed", opts.seed, "override the master seed");
  cmd->add_option("--jobs", opts.jobs, "worker count");
  cmd->add_flag("--resume", opts.resume,
                "skip jobs already completed for this (config, seed)");
  cmd->add_flag("--strict-config", opts.strict_config,
                "reject unknown config keys instead of warning");
}

geoboot::Pipeline make_pipeline(const CommonOptions& opts) {
  geoboot::ProjectConfig config =
      geoboot::read_config(opts.config_path, opts.strict_config);
  if (opts.seed) config.plan.master_seed = *opts.seed;
  return geoboot::Pipeline(std::move(config), opts.out_dir,
                           std::max(1, opts.jobs), opts.resume);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geoboot: conceptual-model uncertainty assessment by spatial "
               "bootstrap and Bayesian update"};
  app.require_subcommand(1);

  CommonOptions make_initial_opts;
  CLI::App* cmd_make_initial = app.add_subcommand(
      "make-initial", "generate the synthetic initial porosity map");
  add_common(cmd_make_initial, make_initial_opts);

  CommonOptions run_all_opts;
  CLI::App* cmd_run_all = app.add_subcommand(
      "run-all",
      "run the full workflow: realities, samples, scenarios, bayes, rank");
  add_common(cmd_run_all, run_all_opts);

  CommonOptions stage_opts;
  std::string stage_name_arg;
  CLI::App* cmd_stage =
      app.add_subcommand("stage", "run one stage against existing artifacts");
  cmd_stage->add_option("name", stage_name_arg,
                        "realities | samples | scenarios | bayes | rank")
      ->required();
  add_common(cmd_stage, stage_opts);

  CommonOptions report_opts;
  CLI::App* cmd_report =
      app.add_subcommand("report", "summarize a run directory");
  add_common(cmd_report, report_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_make_initial->parsed()) {
      return make_pipeline(make_initial_opts).make_initial();
    }
    if (cmd_run_all->parsed()) {
      return make_pipeline(run_all_opts).run_all();
    }
    if (cmd_stage->parsed()) {
      const auto stage = geoboot::stage_from_name(stage_name_arg);
      if (!stage) {
        std::cerr << "geoboot: unknown stage '" << stage_name_arg
                  << "' (expected initial, realities, samples, scenarios, "
                     "bayes or rank)\n";
        return geoboot::kExitConfigError;
      }
      return make_pipeline(stage_opts).run_stage(*stage);
    }
    if (cmd_report->parsed()) {
      return make_pipeline(report_opts).report(std::cout);
    }
  } catch (const geoboot::ConfigError& e) {
    std::cerr << "geoboot: config error: " << e.what() << "\n";
    return geoboot::kExitConfigError;
  } catch (const geoboot::Error& e) {
    std::cerr << "geoboot: " << e.what() << "\n";
    return geoboot::kExitPartialFailure;
  } catch (const std::exception& e) {
    std::cerr << "geoboot: " << e.what() << "\n";
    return geoboot::kExitPartialFailure;
  }
  return geoboot::kExitOk;
}
