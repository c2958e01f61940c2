#include <cstdlib>

#include "hicu/metrics.hpp"
#include "hicu/oracle.hpp"
#include "hicu/simdata.hpp"
#include "support.hpp"

using namespace hicu;
using hicu::test::Gen;
using hicu::test::rel_diff;

TEST_CASE("dense Hankel examples") {
  CTensor X({3}, std::vector<cplx>{1, 2, 3});
  auto K = KernelMask::rectangular({2});
  auto D = build_hankel_dense(X, K, Region::full({3}, K));
  CMatrix expected(2, 2);
  expected << 1, 2, 2, 3;
  CHECK(D.matrix == expected);
  CHECK(D.row_origin(1) == Dims{1});

  auto Dc = build_hankel_dense(X, K, Region::full({3}, K, {0}));
  CMatrix ec(3, 2);
  ec << 1, 2, 2, 3, 3, 1;
  CHECK(Dc.matrix == ec);
}

TEST_CASE("dense threshold is enforced and overridable") {
  Gen g(41);
  auto X = g.tensor({16, 16, 2});
  auto K = KernelMask::rectangular({5, 5, 2});
  auto S = Region::full(X.dims(), K);
  CHECK(dense_threshold() == (Index{1} << 24));
  setenv("HICU_DENSE_THRESHOLD", "100", 1);
  CHECK(dense_threshold() == 100);
  CHECK_THROWS_AS(build_hankel_dense(X, K, S), SizeError);
  CHECK_THROWS_AS(tail_energy_dense(X, K, S, 1), SizeError);
  unsetenv("HICU_DENSE_THRESHOLD");
  CHECK_NOTHROW(build_hankel_dense(X, K, S));
}

TEST_CASE("tail energy cross-checks") {
  Gen g(42);
  for (int t = 0; t < 5; ++t) {
    auto inst = g.instance({8, 8, 2}, {3, 3, 2}, true);
    auto const &[dims, K, S] = inst;
    auto X = g.tensor(dims);
    auto D = build_hankel_dense(X, K, S);
    double const fro = D.matrix.squaredNorm();
    CHECK(std::abs(tail_energy_dense(X, K, S, 0) - fro) <= 1e-10 * fro);
    Index const full = std::min(S.s(), K.n());
    CHECK(tail_energy_dense(X, K, S, full) == 0.0);
    CHECK(tail_energy_dense(X, K, S, full + 3) == 0.0);
    Index const r = std::max<Index>(1, full / 2);
    auto sv = hankel_singular_values(X, K, S);
    double const head = sv.head(r).squaredNorm();
    CHECK(std::abs(tail_energy_dense(X, K, S, r) - (fro - head)) <= 1e-10 * fro);
  }
}

TEST_CASE("numerical rank") {
  Eigen::VectorXd sv(4);
  sv << 1.0, 1e-3, 1e-10, 0.0;
  CHECK(numerical_rank(sv) == 2);
  CHECK(numerical_rank(sv, 1e-11) == 3);
  CHECK(numerical_rank(Eigen::VectorXd::Zero(3)) == 0);
}

TEST_CASE("structure projection is a projection") {
  Gen g(43);
  for (int t = 0; t < 10; ++t) {
    auto inst = g.instance({9, 9, 2}, {4, 4, 2}, true);
    auto const &[dims, K, S] = inst;
    auto X = g.tensor(dims);
    auto D = build_hankel_dense(X, K, S);
    CMatrix const A = g.matrix(D.matrix.rows(), D.matrix.cols());
    auto once = structure_projection(A, D, X);
    auto relift = build_hankel_dense(once, K, S).matrix;
    auto twice = structure_projection(relift, D, X);
    CHECK(rel_diff(once, twice) <= 1e-12);
    // a Hankel matrix is a fixed point
    CHECK(rel_diff(structure_projection(D.matrix, D, X), X) <= 1e-14);
  }
}

TEST_CASE("cadzow trivial cases and data consistency at every iterate") {
  Gen g(44);
  auto X = g.tensor({8, 8, 2});
  auto K = KernelMask::rectangular({3, 3, 2});
  auto ones = BinaryMask(X.dims(), 1);
  CHECK(cadzow_complete(X, ones, K, 2, 3).estimate == X);

  auto M = g.mask(X.dims(), 0.5);
  auto X0 = mask_apply(X, M);
  Index const full = std::min(Region::full(X.dims(), K).s(), K.n());
  auto id = cadzow_complete(X0, M, K, full, 1).estimate;
  CHECK(rel_diff(id, X0) <= 1e-12);

  int calls = 0;
  CadzowOptions opts;
  opts.reference = &X;
  opts.on_iterate = [&](Index, CTensor const &Y) {
    ++calls;
    for (Index m = 0; m < Y.size(); ++m)
      if (M[m])
        REQUIRE(Y[m] == X0[m]);
  };
  auto res = cadzow_complete(X0, M, K, 6, 5, opts);
  CHECK(calls == 5);
  CHECK(res.trace.size() == 5);
}

TEST_CASE("gradient_bruteforce trivial cases and limits") {
  Gen g(45);
  auto Y = g.tensor({5, 5, 2});
  auto K = KernelMask::rectangular({2, 2, 2});
  auto S = Region::full(Y.dims(), K);
  auto M = g.mask(Y.dims(), 0.5);
  CHECK(gradient_bruteforce(Y, CMatrix::Zero(K.n(), 2), K, S, DataConsistency::hard(M)) == CTensor(Y.dims()));
  auto big = g.tensor({33, 32, 4});
  auto Kb = KernelMask::rectangular({2, 2, 4});
  CHECK_THROWS_AS(gradient_bruteforce(big, g.matrix(Kb.n(), 1), Kb, Region::full(big.dims(), Kb),
                                      DataConsistency::none()),
                  SizeError);
}

TEST_CASE("order-1 phantom has at least Nc(Nc-1)/2 negligible singular values") {
  PhantomSpec spec;
  spec.nx = 24;
  spec.ny = 24;
  spec.ncoils = 4;
  spec.sens_kspace_order = 1;
  auto ph = gen_phantom(spec);
  auto K = KernelMask::rectangular({5, 5, 4});
  auto S = Region::full(ph.kspace.dims(), K);
  auto sv = hankel_singular_values(ph.kspace, K, S);
  Index small = 0;
  for (Index i = 0; i < sv.size(); ++i)
    small += sv(i) <= 1e-9 * sv(0) ? 1 : 0;
  CHECK(small >= 4 * 3 / 2);
  Index const r = numerical_rank(sv);
  double const fro = sv.squaredNorm();
  CHECK(tail_energy_dense(ph.kspace, K, S, r) <= 1e-18 * fro);
}
