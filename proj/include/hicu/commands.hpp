#pragma once

#include <iosfwd>

#include "hicu/run_config.hpp"

namespace hicu {

/// Writes k-space, coil images and the resolved phantom spec into `out_dir`.
Phantom cmd_phantom(RunConfig const &cfg, std::filesystem::path const &out_dir);

/// Writes the sampling mask into `out_dir` and prints the achieved acceleration.
BinaryMask cmd_mask(RunConfig const &cfg, std::filesystem::path const &out_dir, std::ostream &out);

/// Reconstructs from the configured k-space and mask files, writing the estimate and a report.
/// Missing input paths fall back to the files cmd_phantom/cmd_mask write into `out_dir`; the
/// phantom k-space then also serves as the reference.
ReconResult cmd_recon(RunConfig const &cfg, std::filesystem::path const &out_dir, std::ostream &out);

struct MetricsReport {
  std::optional<double> ser_db, hfen_db, ssim;
};

MetricsReport compute_metrics(CTensor const &ref_kspace, CTensor const &est_kspace, MetricToggles const &opts);
/// "SER: 12.34 dB" style lines; infinite values print as "+inf".
std::string format_metrics(MetricsReport const &r);
MetricsReport cmd_metrics(std::filesystem::path const &ref, std::filesystem::path const &est,
                          MetricToggles const &opts, std::ostream &out);

} // namespace hicu
