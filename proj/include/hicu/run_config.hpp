#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "hicu/simdata.hpp"
#include "hicu/solver.hpp"

namespace hicu {

struct KernelConfig {
  Dims extents;
  bool ellipsoid = false;
  Index spatial_axes = 2;
  KernelMask build() const;
};

struct MetricToggles {
  bool ser = true;
  bool hfen = true;
  bool ssim = true;
  /// HFEN on SSoS-combined images rather than per coil.
  bool ssos = true;
  /// Axes transformed to image space; empty means {0, 1}.
  std::vector<Index> spatial_axes;
};

struct RunInputs {
  std::optional<std::filesystem::path> kspace, mask, reference;
};

struct RunOutputs {
  std::string kspace = "kspace.hicu";
  std::string coil_images = "coil_images.hicu";
  std::string phantom_spec = "phantom.json";
  std::string mask = "mask.hicu";
  std::string recon = "recon.hicu";
  std::string report = "report.json";
};

/// JSON run configuration. Unknown keys are rejected at every level.
struct RunConfig {
  std::uint64_t seed = 1;
  std::optional<PhantomSpec> phantom;
  std::optional<double> noise_snr_db;
  std::optional<MaskSpec> mask;
  std::optional<MaskAxes> mask_axes;
  std::optional<Dims> mask_dims;
  std::optional<KernelConfig> kernel;
  std::optional<SolverSchedule> schedule;
  int power_iterations = 0;
  bool track_tail_energy = false;
  MetricToggles metrics;
  RunInputs inputs;
  RunOutputs outputs;
  /// Relative input paths resolve against this directory.
  std::filesystem::path base_dir = ".";

  /// Dims of the k-space the phantom section produces.
  Dims phantom_dims() const;
  /// Overrides every seed in the document.
  void override_seed(std::uint64_t seed);
};

RunConfig parse_run_config(nlohmann::json const &doc, std::filesystem::path const &base_dir = ".");
RunConfig load_run_config(std::filesystem::path const &path);

nlohmann::json to_json(PhantomSpec const &spec);
nlohmann::json to_json(MaskSpec const &spec);
nlohmann::json to_json(SolverSchedule const &sched);
nlohmann::json to_json(ReconReport const &report, bool include_timing = true);
std::string mask_pattern_name(MaskPattern p);

} // namespace hicu
