#include "hicu/solver.hpp"

#include <chrono>
#include <cmath>

#include "hicu/metrics.hpp"
#include "hicu/oracle.hpp"

namespace hicu {

Region stage_region(Dims const &dims, KernelMask const &K, RegionSpec const &spec,
                    std::vector<Index> const &circular_axes) {
  auto const nd = static_cast<Index>(dims.size());
  if (K.rank() != nd)
    throw ConfigError("kernel rank does not match k-space dims " + to_string(dims));
  Region S;
  S.offsets.assign(dims.size(), 0);
  S.extents.assign(dims.size(), 0);
  S.circular.assign(dims.size(), false);
  for (auto a : circular_axes) {
    if (a < 0 || a >= nd)
      throw ConfigError("circular axis " + std::to_string(a) + " out of range");
    S.circular[static_cast<std::size_t>(a)] = true;
  }
  for (Index d = 0; d < nd; ++d) {
    auto const u = static_cast<std::size_t>(d);
    Index const N = dims[u], Kd = K.extents()[u];
    if (S.circular[u]) {
      if (Kd > N)
        throw ConfigError("kernel longer than circular axis " + std::to_string(d));
      S.extents[u] = N;
      continue;
    }
    Index window = N;
    bool const coil = d == nd - 1;
    if (!coil && spec.kind == RegionSpec::Kind::Fraction && u < spec.fraction.size()) {
      double const f = spec.fraction[u];
      if (!(f > 0.0 && f <= 1.0))
        throw ConfigError("region fraction must lie in (0, 1]");
      window = static_cast<Index>(std::floor(f * static_cast<double>(N) + 1e-9));
    } else if (!coil && spec.kind == RegionSpec::Kind::Window && u < spec.window.size()) {
      window = spec.window[u];
    }
    if (window > N)
      throw ConfigError("region window exceeds array extent on axis " + std::to_string(d));
    if (window < Kd)
      throw ConfigError("region window " + std::to_string(window) + " smaller than kernel extent " +
                        std::to_string(Kd) + " on axis " + std::to_string(d));
    S.extents[u] = window - Kd + 1;
    S.offsets[u] = (N - window) / 2;
  }
  return S;
}

Index SolverSchedule::total_iterations() const {
  Index total = 0;
  for (auto const &st : stages)
    total += st.iterations;
  return total;
}

SolverSchedule study1_schedule(Index ncoils, Index rank, Index stage1_iterations, Index stage2_iterations,
                               Index spatial_axes) {
  SolverSchedule s;
  s.rank = rank;
  std::vector<double> quarter(static_cast<std::size_t>(spatial_axes), 0.25);
  s.stages.push_back({RegionSpec::fractions(quarter), ncoils, 5, stage1_iterations});
  s.stages.push_back({RegionSpec::full(), 4 * ncoils, 10, stage2_iterations});
  return s;
}

namespace {

void validate_schedule(SolverSchedule const &sched, Dims const &dims, KernelMask const &K,
                       std::vector<Region> &regions) {
  if (sched.rank < 1)
    throw ConfigError("schedule: rank must be >= 1");
  if (sched.stages.empty())
    throw ConfigError("schedule: no stages");
  if (sched.rank >= K.n())
    throw ConfigError("schedule: rank " + std::to_string(sched.rank) + " must be below kernel support size " +
                      std::to_string(K.n()));
  if (sched.dc_mode == DcMode::Soft && !(sched.lambda > 0.0))
    throw ConfigError("schedule: soft data consistency needs lambda > 0");
  Index const l = sketch_width_for_rank(sched.rank);
  for (auto const &st : sched.stages) {
    if (st.p < 1 || st.G < 1 || st.iterations < 1)
      throw ConfigError("schedule: every stage needs p, G and iterations >= 1");
    Region S;
    try {
      S = stage_region(dims, K, st.region, sched.circular_axes);
      validate_geometry(dims, K, S);
    } catch (ShapeError const &e) {
      throw ConfigError(std::string("schedule: ") + e.what());
    }
    if (l > S.s())
      throw ConfigError("schedule: sketch width " + std::to_string(l) + " exceeds stage region size " +
                        std::to_string(S.s()));
    regions.push_back(std::move(S));
  }
}

} // namespace

ReconResult hicu_reconstruct(CTensor const &X0, BinaryMask const &M, KernelMask const &K,
                             SolverSchedule const &sched, ReconOptions const &opts) {
  require_same_dims(X0.dims(), M.dims(), "hicu_reconstruct");
  if (opts.reference)
    require_same_dims(X0.dims(), opts.reference->dims(), "hicu_reconstruct reference");
  std::vector<Region> regions;
  validate_schedule(sched, X0.dims(), K, regions);

  auto const dc = sched.dc_mode == DcMode::Hard ? DataConsistency::hard(M)
                                                : DataConsistency::soft(M, X0, sched.lambda);
  auto const full_region = Region::full(X0.dims(), K, sched.circular_axes);

  ReconResult res{mask_apply(X0, M), {}};
  auto &rep = res.report;
  rep.sketch_width = sketch_width_for_rank(sched.rank);
  auto const t0 = std::chrono::steady_clock::now();
  auto const elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  auto const start_counts = conv_counts();

  CTensor &Y = res.estimate;
  Index global_it = 0;
  for (std::size_t si = 0; si < sched.stages.size(); ++si) {
    auto const &stage = sched.stages[si];
    auto const &S = regions[si];
    rep.largest_region = std::max(rep.largest_region, S.s());
    for (Index it = 0; it < stage.iterations; ++it) {
      ++global_it;
      auto const it_counts = conv_counts();
      IterationRecord rec;
      rec.stage = static_cast<Index>(si);
      rec.iteration = global_it;
      rec.region_size = S.s();

      RngStream sketch_stream{sched.seed, si, static_cast<std::uint64_t>(it), 0, StreamPurpose::Sketch};
      auto const rs = rsvd_right_vectors(Y, K, S, sched.rank, sketch_stream, opts.rsvd);
      rec.rsvd_peak_aux_values = rs.peak_aux_values;
      rep.peak_aux_values = std::max(rep.peak_aux_values, rs.peak_aux_values);
      auto const Q = householder_nullspace(rs.V).Q;

      for (Index j = 0; j < stage.G; ++j) {
        RngStream jl_stream{sched.seed, si, static_cast<std::uint64_t>(it), static_cast<std::uint64_t>(j) + 1,
                            StreamPurpose::Compress};
        CMatrix const Qt = jl_compress(Q, stage.p, jl_stream);
        auto og = objective_and_gradient(Y, Qt, K, S, dc);
        StepRecord step;
        step.stage = rec.stage;
        step.iteration = global_it;
        step.step = j + 1;
        step.objective_before = step.objective_after = og.objective;
        try {
          auto const ls = exact_line_search(Y, og.gradient, Qt, og.residuals, K, S, dc);
          for (Index m = 0; m < Y.size(); ++m)
            Y[m] -= ls.step * og.gradient[m];
          step.eta = ls.step;
          step.objective_after = opts.audit_steps ? compressed_cost(Y, Qt, K, S, dc) : ls.cost_after(og.objective);
        } catch (DegenerateDirectionError const &) {
          step.skipped = true;
          ++rec.skipped_steps;
        }
        rec.objective = step.objective_after;
        step.seconds = elapsed();
        if (opts.reference)
          step.ser_db = ser(*opts.reference, Y);
        rep.steps.push_back(step);
      }

      rec.seconds = elapsed();
      if (opts.reference)
        rec.ser_db = ser(*opts.reference, Y);
      if (opts.track_tail_energy && full_region.s() * K.n() <= opts.tail_energy_threshold)
        rec.tail_energy = tail_energy_dense(Y, K, full_region, sched.rank);
      rec.counts = conv_counts() - it_counts;
      rep.skipped_steps += rec.skipped_steps;
      rep.iterations.push_back(rec);
      if (opts.on_iterate)
        opts.on_iterate(global_it, Y);
    }
  }
  rep.total_counts = conv_counts() - start_counts;
  return res;
}

} // namespace hicu
