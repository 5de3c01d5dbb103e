// holo: experiment runner for intensity-only field recovery.
//
//   holo synth       --config cfg.json   field values and intensities on a ray
//   holo recover     --config cfg.json   single-ray recovery
//   holo convergence --config cfg.json   convergence-order study
//   holo plane       --config cfg.json   recovery at targets on a plane
//
// Exit status: 0 when every configured check passed, 1 when a check failed,
// 2 on configuration or runtime errors.

#include <iostream>

#include <CLI11.hpp>

#include "holo/errors.hpp"
#include "holo/runner.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void add_common(CLI::App *cmd, CommonOptions &opts) {
  cmd->add_option("--config", opts.config, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out, "output directory (overrides config)");
  cmd->add_option("--seed", opts.seed, "noise seed (overrides config)");
  cmd->add_flag("--quiet", opts.quiet, "suppress stdout tables");
}

holo::ExperimentConfig load(const CommonOptions &opts) {
  holo::ExperimentConfig cfg = holo::load_config(opts.config);
  if (!opts.out.empty())
    cfg.output.directory = opts.out;
  if (opts.seed && cfg.noise)
    cfg.noise->seed = *opts.seed;
  return cfg;
}

void report_paths(const std::vector<std::filesystem::path> &paths,
                  bool quiet) {
  if (quiet)
    return;
  for (const auto &p : paths)
    std::cerr << "wrote " << p.string() << "\n";
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Recovery of radiated wave fields from intensity-only data"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto *synth = app.add_subcommand("synth", "print field values along a ray");
  auto *recover = app.add_subcommand("recover", "single-ray recovery");
  auto *convergence =
      app.add_subcommand("convergence", "convergence-order study");
  auto *plane = app.add_subcommand("plane", "recovery on a plane");
  for (auto *cmd : {synth, recover, convergence, plane})
    add_common(cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    const holo::ExperimentConfig cfg = load(opts);
    const std::filesystem::path dir = cfg.output.directory;

    if (synth->parsed()) {
      const std::string csv =
          holo::format_synth_csv(cfg.id, holo::run_synth(cfg));
      report_paths({holo::write_text(dir / (cfg.id + "_synth.csv"), csv)},
                   opts.quiet);
      if (!opts.quiet)
        std::cout << csv;
      return 0;
    }

    if (plane->parsed()) {
      const holo::PlaneDemoResult result = holo::run_plane_demo(cfg);
      report_paths(holo::write_plane_report(result, dir), opts.quiet);
      if (!opts.quiet)
        std::cout << holo::format_plane_csv(cfg.id, result.rows) << "\n"
                  << holo::format_summary(result.summary);
      return result.summary.passed() ? 0 : 1;
    }

    const holo::RunResult result = recover->parsed()
                                       ? holo::run_recover(cfg)
                                       : holo::run_convergence(cfg);
    report_paths(holo::write_report(result.rows, result.summary, dir),
                 opts.quiet);
    if (!opts.quiet)
      std::cout << holo::format_results_csv(result.rows) << "\n"
                << holo::format_summary(result.summary);
    return result.summary.passed() ? 0 : 1;
  } catch (const holo::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
