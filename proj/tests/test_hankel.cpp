#include "hicu/oracle.hpp"
#include "hicu/subspace.hpp"
#include "support.hpp"

using namespace hicu;
using hicu::test::frob_inner;
using hicu::test::Gen;
using hicu::test::rel_diff;

namespace {

CTensor vec1(std::vector<cplx> v) {
  auto const n = static_cast<Index>(v.size());
  return CTensor({n}, std::move(v));
}

CMatrix col(std::vector<cplx> v) {
  CMatrix m(static_cast<Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i)
    m(static_cast<Index>(i), 0) = v[i];
  return m;
}

} // namespace

TEST_CASE("hankel_apply examples") {
  auto X = vec1({1, 2, 3});
  auto K = KernelMask::rectangular({2});
  auto S = Region::full({3}, K);
  auto out = hankel_apply(X, col({1, -1}), K, S);
  REQUIRE(out.rows() == 2);
  CHECK(out(0, 0) == cplx{-1, 0});
  CHECK(out(1, 0) == cplx{-1, 0});

  auto Sc = Region::full({3}, K, {0});
  auto circ = hankel_apply(X, col({1, 1}), K, Sc);
  REQUIRE(circ.rows() == 3);
  CHECK(circ(0, 0) == cplx{3, 0});
  CHECK(circ(1, 0) == cplx{5, 0});
  CHECK(circ(2, 0) == cplx{4, 0});

  CHECK_THROWS_AS(hankel_apply(X, col({1, 1, 1, 1}), KernelMask::rectangular({4}), Region{{0}, {1}, {false}}),
                  ShapeError);
}

TEST_CASE("impulse kernel reads the window slice") {
  Gen g(11);
  for (int t = 0; t < 10; ++t) {
    auto inst = g.instance({9, 8, 3}, {4, 3, 3}, true);
    auto X = g.tensor(inst.dims);
    Index const n = inst.K.n();
    Index const col0 = g.uniform_int(0, n - 1);
    CMatrix v = CMatrix::Zero(n, 1);
    v(col0, 0) = 1.0;
    auto out = hankel_apply(X, v, inst.K, inst.S);
    auto D = build_hankel_dense(X, inst.K, inst.S);
    for (Index i = 0; i < inst.S.s(); ++i)
      CHECK(out(i, 0) == X[D.location(i, col0)]);
  }
}

TEST_CASE("hankel_adjoint_apply examples") {
  auto K = KernelMask::rectangular({2});
  auto S = Region::full({3}, K);
  auto X = vec1({1, 1, 1});
  cplx const u0{1, 2}, u1{-3, 0.5};
  auto out = hankel_adjoint_apply(X, col({u0, u1}), K, S);
  CHECK(out(0, 0) == u0 + u1);
  CHECK(out(1, 0) == u0 + u1);
  auto z = hankel_adjoint_apply(vec1({1, 2, 3}), CMatrix::Zero(2, 3), K, S);
  CHECK(z.isZero(0.0));
  CHECK_THROWS_AS(hankel_adjoint_apply(X, CMatrix::Zero(3, 1), K, S), ShapeError);
}

TEST_CASE("kspace_adjoint_scatter examples") {
  auto K = KernelMask::rectangular({2});
  auto S = Region::full({3}, K);
  cplx const u0{1, 2}, u1{-3, 0.5};
  auto out = kspace_adjoint_scatter(col({1, 0}), col({u0, u1}), K, S, {3});
  CHECK(out[0] == u0);
  CHECK(out[1] == u1);
  CHECK(out[2] == cplx{0, 0});
  auto z = kspace_adjoint_scatter(col({1, 2}), CMatrix::Zero(2, 1), K, S, {3});
  CHECK(z == CTensor({3}));
  CHECK_THROWS_AS(kspace_adjoint_scatter(col({1, 2, 3}), CMatrix::Zero(2, 1), K, S, {3}), ShapeError);
}

TEST_CASE("omp kernels agree with the serial reference") {
  Gen g(12);
  for (int t = 0; t < 60; ++t) {
    auto inst = g.instance({12, 10, 4}, {5, 5, 4}, true);
    auto const &[dims, K, S] = inst;
    Index const k = g.uniform_int(1, 5);
    auto X = g.tensor(dims);
    auto V = g.matrix(K.n(), k);
    auto U = g.matrix(S.s(), k);
    CMatrix a(S.s(), k), b(S.s(), k);
    kernels::serial::forward(X, V, K, S, a);
    kernels::omp::forward(X, V, K, S, b);
    CHECK(rel_diff(a, b) <= 1e-13);
    CMatrix c(K.n(), k), d(K.n(), k);
    kernels::serial::adjoint(X, U, K, S, c);
    kernels::omp::adjoint(X, U, K, S, d);
    CHECK(rel_diff(c, d) <= 1e-13);
    CTensor e(dims), f(dims);
    kernels::serial::scatter(V, U, K, S, e);
    kernels::omp::scatter(V, U, K, S, f);
    CHECK(rel_diff(e, f) <= 1e-13);
  }
}

TEST_CASE("randomized adjoint tests for all three operator pairs") {
  Gen g(13);
  for (int t = 0; t < 100; ++t) {
    auto inst = g.instance({16, 16, 4}, {5, 5, 4}, true);
    auto const &[dims, K, S] = inst;
    Index const k = g.uniform_int(1, 3);
    auto X = g.tensor(dims);
    auto V = g.matrix(K.n(), k);
    auto U = g.matrix(S.s(), k);
    double const scale = V.norm() * U.norm() * norm(X.span());
    // X fixed: V -> H(X) V against U -> H(X)^H U
    cplx const lhs = frob_inner(hankel_apply(X, V, K, S), U);
    cplx const rhs = frob_inner(V, hankel_adjoint_apply(X, U, K, S));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
    // q fixed: X -> H(X) q against the scatter
    auto Y = g.tensor(dims);
    cplx const l2 = frob_inner(hankel_apply(Y, V, K, S), U);
    cplx const r2 = inner(Y.span(), kspace_adjoint_scatter(V, U, K, S, dims).span());
    CHECK(std::abs(l2 - r2) <= 1e-10 * V.norm() * U.norm() * norm(Y.span()));
  }
}

TEST_CASE("dense equivalence of forward and adjoint products") {
  Gen g(14);
  {
    auto X = g.tensor({8, 8, 2});
    auto K = KernelMask::rectangular({3, 3, 2});
    auto S = Region::full(X.dims(), K);
    auto V = g.matrix(K.n(), 3);
    auto D = build_hankel_dense(X, K, S);
    CHECK(rel_diff(hankel_apply(X, V, K, S), D.matrix * V) <= 1e-12);
  }
  for (int t = 0; t < 20; ++t) {
    auto inst = g.instance({12, 12, 3}, {5, 5, 3}, true);
    auto const &[dims, K, S] = inst;
    auto X = g.tensor(dims);
    auto D = build_hankel_dense(X, K, S);
    auto V = g.matrix(K.n(), 2);
    auto U = g.matrix(S.s(), 2);
    CHECK(rel_diff(hankel_apply(X, V, K, S), D.matrix * V) <= 1e-12);
    CHECK(rel_diff(hankel_adjoint_apply(X, U, K, S), D.matrix.adjoint() * U) <= 1e-12);
  }
}

TEST_CASE("linearity in X") {
  Gen g(15);
  for (int t = 0; t < 20; ++t) {
    auto inst = g.instance({10, 10, 3}, {4, 4, 3}, true);
    auto const &[dims, K, S] = inst;
    auto X = g.tensor(dims), Z = g.tensor(dims);
    cplx const a = g.cnormal(), b = g.cnormal();
    auto V = g.matrix(K.n(), 2);
    CMatrix lhs = hankel_apply(a * X + b * Z, V, K, S);
    CMatrix rhs = a * hankel_apply(X, V, K, S) + b * hankel_apply(Z, V, K, S);
    CHECK(rel_diff(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("sub-region rows equal the full-region rows exactly") {
  Gen g(16);
  for (int t = 0; t < 20; ++t) {
    Dims dims{g.uniform_int(5, 12), g.uniform_int(5, 12), 3};
    auto K = KernelMask::rectangular({g.uniform_int(1, 5), g.uniform_int(1, 5), 3});
    auto X = g.tensor(dims);
    auto V = g.matrix(K.n(), 2);
    auto full = Region::full(dims, K);
    Region sub = full;
    for (int d = 0; d < 2; ++d) {
      sub.extents[d] = g.uniform_int(1, full.extents[d]);
      sub.offsets[d] = g.uniform_int(0, full.extents[d] - sub.extents[d]);
    }
    auto F = hankel_apply(X, V, K, full);
    auto P = hankel_apply(X, V, K, sub);
    Index i = 0;
    for (Index a = 0; a < sub.extents[0]; ++a)
      for (Index b = 0; b < sub.extents[1]; ++b, ++i) {
        Index const row = (a + sub.offsets[0]) * full.extents[1] * full.extents[2] + (b + sub.offsets[1]) * full.extents[2];
        CHECK(P.row(i) == F.row(row));
      }
  }
}

TEST_CASE("circular axis equals valid convolution of the wrap-padded array") {
  Gen g(17);
  for (int t = 0; t < 20; ++t) {
    Index const n0 = g.uniform_int(3, 9), n1 = g.uniform_int(3, 8), nc = 2;
    Index const k0 = g.uniform_int(1, 3), k1 = g.uniform_int(1, n1);
    auto X = g.tensor({n0, n1, nc});
    auto K = KernelMask::rectangular({k0, k1, nc});
    auto Sc = Region::full(X.dims(), K, {1});
    // pad axis 1 with its first k1 - 1 planes
    Index const p1 = n1 + k1 - 1;
    CTensor P({n0, p1, nc});
    for (Index a = 0; a < n0; ++a)
      for (Index b = 0; b < p1; ++b)
        for (Index c = 0; c < nc; ++c)
          P.at({a, b, c}) = X.at({a, b % n1, c});
    auto Sp = Region::full(P.dims(), K);
    auto V = g.matrix(K.n(), 2);
    CHECK(hankel_apply(X, V, K, Sc) == hankel_apply(P, V, K, Sp));
  }
}

TEST_CASE("convolution counters count batched columns") {
  Gen g(18);
  auto X = g.tensor({8, 8, 2});
  auto K = KernelMask::rectangular({3, 3, 2});
  auto S = Region::full(X.dims(), K);
  auto before = conv_counts();
  hankel_apply(X, g.matrix(K.n(), 3), K, S);
  hankel_adjoint_apply(X, g.matrix(S.s(), 4), K, S);
  kspace_adjoint_scatter(g.matrix(K.n(), 5), g.matrix(S.s(), 5), K, S, X.dims());
  CHECK(conv_counts() - before == ConvCounts{3, 4, 5});
}

TEST_CASE("objective and gradient: trivial cases") {
  Gen g(19);
  auto X = g.tensor({6, 6, 2});
  auto K = KernelMask::rectangular({3, 3, 2});
  auto S = Region::full(X.dims(), K);
  auto M = g.mask(X.dims(), 0.5);
  auto og = objective_and_gradient(X, CMatrix::Zero(K.n(), 3), K, S, DataConsistency::hard(M));
  CHECK(og.objective == 0.0);
  CHECK(og.gradient == CTensor(X.dims()));

  // Qt in the exact nullspace: a sum of two exponentials is annihilated by the trailing
  // right singular vectors of its 4-column Hankel matrix.
  Index const N = 16;
  CTensor Y({N});
  for (Index i = 0; i < N; ++i)
    Y[i] = std::polar(1.0, 0.3 * i) + 0.5 * std::polar(1.0, -1.1 * i);
  auto K1 = KernelMask::rectangular({4});
  auto S1 = Region::full({N}, K1);
  auto D1 = build_hankel_dense(Y, K1, S1);
  Eigen::BDCSVD<CMatrix> s1(D1.matrix, Eigen::ComputeFullV);
  CMatrix const Qt = s1.matrixV().rightCols(2);
  auto og1 = objective_and_gradient(Y, Qt, K1, S1, DataConsistency::none());
  CHECK(og1.objective <= 1e-20 * norm_sq(Y.span()));
  CHECK(norm(og1.gradient.span()) <= 1e-9 * norm(Y.span()));
  auto ls = exact_line_search(Y, g.tensor({N}), Qt, og1.residuals, K1, S1, DataConsistency::none());
  CHECK(std::abs(ls.step) <= 1e-9);
}

TEST_CASE("objective_and_gradient and exact_line_search counts") {
  Gen g(20);
  auto X = g.tensor({8, 8, 2});
  auto K = KernelMask::rectangular({3, 3, 2});
  auto S = Region::full(X.dims(), K);
  auto Qt = g.matrix(K.n(), 6);
  auto M = g.mask(X.dims(), 0.4);
  auto before = conv_counts();
  auto og = objective_and_gradient(X, Qt, K, S, DataConsistency::hard(M));
  CHECK(conv_counts() - before == ConvCounts{6, 0, 6});
  before = conv_counts();
  exact_line_search(X, og.gradient, Qt, og.residuals, K, S, DataConsistency::hard(M));
  CHECK(conv_counts() - before == ConvCounts{6, 0, 0});
}

TEST_CASE("gradient matches central differences in hard and soft modes") {
  Gen g(21);
  for (int t = 0; t < 20; ++t) {
    auto inst = g.instance({8, 8, 3}, {3, 3, 3}, true);
    auto const &[dims, K, S] = inst;
    auto Y = g.tensor(dims);
    auto X0 = g.tensor(dims);
    auto M = g.mask(dims, 0.4);
    auto Qt = g.matrix(K.n(), g.uniform_int(1, 4));
    bool const soft = t % 2 == 1;
    auto dc = soft ? DataConsistency::soft(M, X0, 0.7) : DataConsistency::hard(M);
    auto og = objective_and_gradient(Y, Qt, K, S, dc);
    auto bf = gradient_bruteforce(Y, Qt, K, S, dc);
    CHECK(rel_diff(og.gradient, bf) <= 1e-5);
    CHECK(std::abs(og.objective - compressed_cost(Y, Qt, K, S, dc)) <= 1e-12 * og.objective);
    if (!soft)
      for (Index m = 0; m < Y.size(); ++m)
        if (M[m]) {
          CHECK(og.gradient[m] == cplx{0, 0});
          CHECK(bf[m] == cplx{0, 0});
        }
    // directional derivative along 20 random coordinates: d/dh cost(Y + h e) = 2 Re<g, e>
    for (int c = 0; c < 20; ++c) {
      Index const m = g.uniform_int(0, Y.size() - 1);
      if (!soft && M[m])
        continue;
      cplx const e = g.coin() ? cplx{1, 0} : cplx{0, 1};
      double const h = 1e-6;
      auto Yp = Y, Ym = Y;
      Yp[m] += h * e;
      Ym[m] -= h * e;
      double const fd = (compressed_cost(Yp, Qt, K, S, dc) - compressed_cost(Ym, Qt, K, S, dc)) / (2 * h);
      double const an = 2.0 * std::real(std::conj(og.gradient[m]) * e);
      CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, norm(og.gradient.span())));
    }
  }
}

TEST_CASE("exact line search: scalar instance") {
  cplx const y{0.7, -1.3};
  CTensor Y({2}, std::vector<cplx>{y, 0});
  auto K = KernelMask::rectangular({2});
  auto S = Region::full({2}, K);
  REQUIRE(S.s() == 1);
  CMatrix q = col({1, 0});
  CTensor gdir({2}, std::vector<cplx>{y, 0});
  auto ls = exact_line_search(Y, gdir, q, K, S, DataConsistency::none());
  CHECK(ls.step == doctest::Approx(1.0).epsilon(1e-14));
  auto og = objective_and_gradient(Y, q, K, S, DataConsistency::none());
  CHECK(og.gradient[0] == y);
  CHECK(og.gradient[1] == cplx{0, 0});
  CTensor after({2}, std::vector<cplx>{y - ls.step * y, 0});
  CHECK(compressed_cost(after, q, K, S, DataConsistency::none()) <= 1e-30);
  CHECK_THROWS_AS(exact_line_search(Y, CTensor({2}, std::vector<cplx>{0, 1}), q, K, S, DataConsistency::none()),
                  DegenerateDirectionError);
}

TEST_CASE("exact line search is optimal on a grid and never increases the cost") {
  Gen g(22);
  for (int t = 0; t < 20; ++t) {
    auto inst = g.instance({10, 10, 3}, {4, 4, 3}, true);
    auto const &[dims, K, S] = inst;
    auto Y = g.tensor(dims);
    auto X0 = g.tensor(dims);
    auto M = g.mask(dims, 0.3);
    auto Qt = g.matrix(K.n(), g.uniform_int(1, 4));
    auto dc = t % 2 ? DataConsistency::soft(M, X0, 0.5) : DataConsistency::hard(M);
    auto og = objective_and_gradient(Y, Qt, K, S, dc);
    auto ls = exact_line_search(Y, og.gradient, Qt, og.residuals, K, S, dc);
    auto phi = [&](double eta) {
      auto Z = Y;
      for (Index m = 0; m < Z.size(); ++m)
        Z[m] -= eta * og.gradient[m];
      return compressed_cost(Z, Qt, K, S, dc);
    };
    double const best = phi(ls.step);
    CHECK(ls.step > 0.0);
    for (int k = 0; k <= 100; ++k) {
      double const eta = 2.0 * ls.step * k / 100.0;
      CHECK(best <= phi(eta) * (1 + 1e-12) + 1e-12);
    }
    CHECK(best < og.objective);
    CHECK(std::abs(ls.cost_after(og.objective) - best) <= 1e-9 * og.objective);
  }
}
