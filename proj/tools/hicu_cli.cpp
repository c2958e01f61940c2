#include <iostream>

#include <CLI11.hpp>
#include <omp.h>

#include "hicu/commands.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  std::string out = ".";
};

void add_common(CLI::App *cmd, Common &c, bool config_required) {
  auto *opt = cmd->add_option("--config", c.config, "JSON run configuration");
  if (config_required)
    opt->required()->check(CLI::ExistingFile);
  else
    opt->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override every seed in the config");
  cmd->add_option("--workers", c.workers, "Worker threads for the convolution kernels")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "Output directory");
}

hicu::RunConfig load(Common const &c) {
  hicu::RunConfig cfg = c.config.empty() ? hicu::RunConfig{} : hicu::load_run_config(c.config);
  if (c.seed)
    cfg.override_seed(*c.seed);
  return cfg;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Calibrationless k-space completion by structured low-rank matrix recovery"};
  app.require_subcommand(1);

  Common common;
  std::string ref, est;
  bool no_ssos = false;

  auto *phantom = app.add_subcommand("phantom", "Generate a multi-coil phantom");
  add_common(phantom, common, true);
  auto *mask = app.add_subcommand("mask", "Generate a sampling mask");
  add_common(mask, common, true);
  auto *recon = app.add_subcommand("recon", "Reconstruct undersampled k-space");
  add_common(recon, common, true);
  auto *metrics = app.add_subcommand("metrics", "Compare an estimate with a reference");
  add_common(metrics, common, false);
  metrics->add_option("--ref", ref, "Reference k-space file")->required();
  metrics->add_option("--est", est, "Estimated k-space file")->required();
  metrics->add_flag("--no-ssos", no_ssos, "HFEN per coil instead of on SSoS images");

  CLI11_PARSE(app, argc, argv);

  try {
    if (common.workers > 0)
      omp_set_num_threads(common.workers);
    auto cfg = load(common);
    if (phantom->parsed()) {
      hicu::cmd_phantom(cfg, common.out);
    } else if (mask->parsed()) {
      hicu::cmd_mask(cfg, common.out, std::cout);
    } else if (recon->parsed()) {
      hicu::cmd_recon(cfg, common.out, std::cout);
    } else if (metrics->parsed()) {
      if (no_ssos)
        cfg.metrics.ssos = false;
      hicu::cmd_metrics(ref, est, cfg.metrics, std::cout);
    }
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
