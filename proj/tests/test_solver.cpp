#include <omp.h>

#include "hicu/metrics.hpp"
#include "hicu/simdata.hpp"
#include "hicu/solver.hpp"
#include "support.hpp"

using namespace hicu;
using hicu::test::rel_diff;

namespace {

struct Problem {
  CTensor truth, X0;
  BinaryMask M;
  KernelMask K = KernelMask::rectangular({5, 5, 4});
};

Problem small_problem(double R = 2.0) {
  PhantomSpec spec;
  spec.nx = 32;
  spec.ny = 32;
  spec.ncoils = 4;
  Problem p;
  p.truth = gen_phantom(spec).kspace;
  p.M = gen_mask(p.truth.dims(), MaskSpec{MaskPattern::VariableDensity1D, R, {6}, 1});
  p.X0 = mask_apply(p.truth, p.M);
  return p;
}

SolverSchedule small_schedule(Index it1 = 4, Index it2 = 6) {
  SolverSchedule s;
  s.rank = 30;
  s.seed = 11;
  s.stages.push_back({RegionSpec::fractions({0.5, 0.5}), 4, 5, it1});
  s.stages.push_back({RegionSpec::full(), 16, 10, it2});
  return s;
}

} // namespace

TEST_CASE("stage_region examples") {
  auto K = KernelMask::rectangular({5, 5, 8});
  auto full = stage_region({64, 48, 8}, K, RegionSpec::full());
  CHECK(full.offsets == Dims{0, 0, 0});
  CHECK(full.extents == Dims{60, 44, 1});

  auto q = stage_region({384, 384, 8}, K, RegionSpec::fractions({0.25, 0.25}));
  CHECK(q.extents == Dims{92, 92, 1});
  CHECK(q.offsets == Dims{144, 144, 0});

  auto Kt = KernelMask::rectangular({5, 5, 5, 8});
  auto t = stage_region({64, 64, 16, 8}, Kt, RegionSpec::fractions({0.25, 0.25, 0.25}), {2});
  CHECK(t.extents[2] == 16);
  CHECK(t.offsets[2] == 0);
  CHECK(t.circular[2]);
  CHECK(t.extents[3] == 1);

  auto w = stage_region({64, 64, 8}, K, RegionSpec::windows({16, 20}));
  CHECK(w.extents == Dims{12, 16, 1});
  CHECK(w.offsets == Dims{24, 22, 0});

  CHECK_THROWS_AS(stage_region({16, 16, 8}, K, RegionSpec::fractions({0.25, 0.25})), ConfigError);
  CHECK_THROWS_AS(stage_region({16, 16, 8}, K, RegionSpec::fractions({0.0, 1.0})), ConfigError);
  CHECK_THROWS_AS(stage_region({16, 16}, K, RegionSpec::full()), ConfigError);
}

TEST_CASE("study-I schedule encodes the two-stage center-out plan") {
  auto s = study1_schedule(8, 30, 50, 20);
  REQUIRE(s.stages.size() == 2);
  CHECK(s.stages[0].region.fraction == std::vector<double>{0.25, 0.25});
  CHECK(s.stages[0].p == 8);
  CHECK(s.stages[0].G == 5);
  CHECK(s.stages[0].iterations == 50);
  CHECK(s.stages[1].region.kind == RegionSpec::Kind::Full);
  CHECK(s.stages[1].p == 32);
  CHECK(s.stages[1].G == 10);
  CHECK(s.total_iterations() == 70);
}

TEST_CASE("schedule validation") {
  auto p = small_problem();
  auto bad = small_schedule();
  bad.rank = 0;
  CHECK_THROWS_AS(hicu_reconstruct(p.X0, p.M, p.K, bad), ConfigError);
  bad = small_schedule();
  bad.rank = p.K.n();
  CHECK_THROWS_AS(hicu_reconstruct(p.X0, p.M, p.K, bad), ConfigError);
  bad = small_schedule();
  bad.stages[0].G = 0;
  CHECK_THROWS_AS(hicu_reconstruct(p.X0, p.M, p.K, bad), ConfigError);
  bad = small_schedule();
  bad.stages.clear();
  CHECK_THROWS_AS(hicu_reconstruct(p.X0, p.M, p.K, bad), ConfigError);
  bad = small_schedule();
  bad.stages[0].region = RegionSpec::fractions({0.1, 0.1});
  CHECK_THROWS_AS(hicu_reconstruct(p.X0, p.M, p.K, bad), ConfigError);
  bad = small_schedule();
  bad.dc_mode = DcMode::Soft;
  CHECK_THROWS_AS(hicu_reconstruct(p.X0, p.M, p.K, bad), ConfigError);
  CHECK_THROWS_AS(hicu_reconstruct(p.X0, BinaryMask({32, 32, 2}, 1), p.K, small_schedule()), ShapeError);
}

TEST_CASE("fully sampled input is returned unchanged") {
  auto p = small_problem();
  BinaryMask ones(p.truth.dims(), 1);
  auto res = hicu_reconstruct(p.truth, ones, p.K, small_schedule(1, 1));
  CHECK(res.estimate == p.truth);
}

TEST_CASE("hard data consistency, per-step descent, report and counter audit") {
  auto p = small_problem();
  auto sched = small_schedule();
  ReconOptions opts;
  opts.reference = &p.truth;
  opts.audit_steps = true;
  opts.track_tail_energy = true;
  Index calls = 0;
  opts.on_iterate = [&](Index, CTensor const &Y) {
    ++calls;
    for (Index m = 0; m < Y.size(); ++m)
      if (p.M[m])
        REQUIRE(Y[m] == p.X0[m]);
  };
  auto res = hicu_reconstruct(p.X0, p.M, p.K, sched, opts);
  auto const &rep = res.report;
  CHECK(calls == sched.total_iterations());
  REQUIRE(static_cast<Index>(rep.iterations.size()) == sched.total_iterations());
  CHECK(static_cast<Index>(rep.steps.size()) == 4 * 5 + 6 * 10);

  for (auto const &st : rep.steps)
    if (!st.skipped)
      CHECK(st.objective_after <= st.objective_before * (1 + 1e-12));

  Index const l = sketch_width_for_rank(sched.rank);
  ConvCounts total;
  double last_seconds = 0.0;
  for (auto const &it : rep.iterations) {
    auto const &st = sched.stages[static_cast<std::size_t>(it.stage)];
    auto const pG = static_cast<std::uint64_t>(st.p * st.G);
    CHECK(it.counts.forward == static_cast<std::uint64_t>(l) + 2 * pG);
    CHECK(it.counts.adjoint == static_cast<std::uint64_t>(l));
    CHECK(it.counts.scatter == pG);
    CHECK(it.seconds >= last_seconds);
    last_seconds = it.seconds;
    CHECK(it.ser_db.has_value());
    CHECK(it.tail_energy.has_value());
    if (it.region_size == rep.largest_region)
      CHECK(static_cast<double>(it.rsvd_peak_aux_values) <= 1.6 * static_cast<double>(sched.rank * it.region_size));
    total.forward += it.counts.forward;
    total.adjoint += it.counts.adjoint;
    total.scatter += it.counts.scatter;
  }
  CHECK(total == rep.total_counts);
  CHECK(rep.sketch_width == l);
  CHECK(rep.largest_region == 28 * 28);
  CHECK(*rep.iterations.back().ser_db > ser(p.truth, p.X0) + 3.0);
}

TEST_CASE("reconstruction is deterministic across runs and thread counts") {
  auto p = small_problem();
  auto sched = small_schedule(2, 3);
  int const saved = omp_get_max_threads();
  omp_set_num_threads(1);
  auto a = hicu_reconstruct(p.X0, p.M, p.K, sched);
  auto b = hicu_reconstruct(p.X0, p.M, p.K, sched);
  omp_set_num_threads(4);
  auto c = hicu_reconstruct(p.X0, p.M, p.K, sched);
  omp_set_num_threads(saved);
  CHECK(a.estimate == b.estimate);
  CHECK(rel_diff(a.estimate, c.estimate) <= 1e-12);
  sched.seed = 12;
  CHECK(!(hicu_reconstruct(p.X0, p.M, p.K, sched).estimate == a.estimate));
}

TEST_CASE("soft data consistency runs and keeps data close") {
  auto p = small_problem();
  auto sched = small_schedule(2, 4);
  sched.dc_mode = DcMode::Soft;
  sched.lambda = 10.0;
  ReconOptions opts;
  opts.reference = &p.truth;
  opts.audit_steps = true;
  auto res = hicu_reconstruct(p.X0, p.M, p.K, sched, opts);
  for (auto const &st : res.report.steps)
    if (!st.skipped)
      CHECK(st.objective_after <= st.objective_before * (1 + 1e-12));
  CHECK(*res.report.iterations.back().ser_db > ser(p.truth, p.X0));
}

TEST_CASE("circular axis schedule on a dynamic phantom") {
  PhantomSpec spec;
  spec.nx = 16;
  spec.ny = 16;
  spec.nt = 6;
  spec.ncoils = 2;
  spec.sens_kspace_order = 0;
  auto X = gen_phantom(spec).kspace;
  auto M = gen_mask(X.dims(), MaskSpec{MaskPattern::VariableDensityTime, 2.0, {4}, 1});
  auto K = KernelMask::rectangular({3, 3, 3, 2});
  SolverSchedule s;
  s.rank = 10;
  s.circular_axes = {2};
  s.stages.push_back({RegionSpec::full(), 4, 3, 3});
  ReconOptions opts;
  opts.reference = &X;
  auto res = hicu_reconstruct(mask_apply(X, M), M, K, s, opts);
  CHECK(res.report.iterations.back().region_size == 14 * 14 * 6);
  CHECK(*res.report.iterations.back().ser_db > ser(X, mask_apply(X, M)));
}
