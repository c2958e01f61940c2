#pragma once

#include <functional>
#include <optional>

#include "hicu/subspace.hpp"

namespace hicu {

/// Which block of valid-convolution outputs a stage works on. Windows are input-array
/// windows centered like crop_center; the coil (last) axis and circular axes are always full.
struct RegionSpec {
  enum class Kind { Full, Fraction, Window };
  Kind kind = Kind::Full;
  /// Per-axis fraction of the array extent, leading axes; missing axes are full.
  std::vector<double> fraction;
  /// Per-axis input window extents, leading axes; missing axes are full.
  Dims window;

  static RegionSpec full() { return {}; }
  static RegionSpec fractions(std::vector<double> f) { return {Kind::Fraction, std::move(f), {}}; }
  static RegionSpec windows(Dims w) { return {Kind::Window, {}, std::move(w)}; }
};

Region stage_region(Dims const &dims, KernelMask const &K, RegionSpec const &spec,
                    std::vector<Index> const &circular_axes = {});

struct Stage {
  RegionSpec region;
  Index p = 1;          // JL compression dimension
  Index G = 1;          // gradient steps per nullspace update
  Index iterations = 1; // nullspace updates in this stage
};

struct SolverSchedule {
  Index rank = 1;
  std::vector<Stage> stages;
  std::vector<Index> circular_axes;
  DcMode dc_mode = DcMode::Hard;
  double lambda = 0.0;
  std::uint64_t seed = 0;

  Index total_iterations() const;
};

/// Two-stage center-out schedule: a 1/4 x 1/4 center region with p = Nc and G = 5, then the
/// full array with p = 4 Nc and G = 10.
SolverSchedule study1_schedule(Index ncoils, Index rank, Index stage1_iterations, Index stage2_iterations,
                               Index spatial_axes = 2);

struct StepRecord {
  Index stage = 0, iteration = 0, step = 0;
  double objective_before = 0.0;
  double objective_after = 0.0;
  double eta = 0.0;
  bool skipped = false;
  double seconds = 0.0;
  std::optional<double> ser_db;
};

struct IterationRecord {
  Index stage = 0;
  Index iteration = 0; // global, 1-based
  /// Compressed objective after the iteration's last gradient step.
  double objective = 0.0;
  /// Full tail energy on the whole valid region, when requested and small enough.
  std::optional<double> tail_energy;
  double seconds = 0.0;
  std::optional<double> ser_db;
  ConvCounts counts; // convolutions performed during this iteration
  std::uint64_t rsvd_peak_aux_values = 0;
  Index region_size = 0; // s
  Index skipped_steps = 0;
};

struct ReconReport {
  std::vector<IterationRecord> iterations;
  std::vector<StepRecord> steps;
  ConvCounts total_counts;
  std::uint64_t peak_aux_values = 0;
  Index largest_region = 0;
  Index sketch_width = 0;
  Index skipped_steps = 0;
};

struct ReconOptions {
  CTensor const *reference = nullptr;
  bool track_tail_energy = false;
  Index tail_energy_threshold = Index{1} << 24;
  /// Recompute each step's compressed cost after the update (uncounted) instead of trusting
  /// the closed form; used by audits.
  bool audit_steps = false;
  RsvdOptions rsvd;
  /// Called with the iterate after every iteration (x^(i)).
  std::function<void(Index, CTensor const &)> on_iterate;
};

struct ReconResult {
  CTensor estimate;
  ReconReport report;
};

/// Alternating minimization of ||H(x) Q||_F^2 over the nullspace basis Q and the unobserved
/// k-space samples. Each iteration re-estimates the principal subspace by rSVD, completes Q with
/// Householder reflections, then takes G gradient steps, each with a fresh JL compression of Q
/// and an exact line search.
ReconResult hicu_reconstruct(CTensor const &X0, BinaryMask const &M, KernelMask const &K,
                             SolverSchedule const &sched, ReconOptions const &opts = {});

} // namespace hicu
