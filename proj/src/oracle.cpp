#include "hicu/oracle.hpp"

#include <chrono>
#include <cstdlib>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hicu/metrics.hpp"

namespace hicu {

Index dense_threshold() {
  if (char const *env = std::getenv("HICU_DENSE_THRESHOLD")) {
    char *end = nullptr;
    long long const v = std::strtoll(env, &end, 10);
    if (end != env && v > 0)
      return static_cast<Index>(v);
  }
  return Index{1} << 24;
}

namespace {

void check_dense_size(Index s, Index n) {
  if (s * n > dense_threshold())
    throw SizeError("dense Hankel of " + std::to_string(s) + "x" + std::to_string(n) + " exceeds threshold " +
                    std::to_string(dense_threshold()));
}

} // namespace

Dims DenseHankel::row_origin(Index i) const {
  Dims idx(region.extents.size());
  for (std::size_t d = idx.size(); d-- > 0;) {
    idx[d] = region.offsets[d] + i % region.extents[d];
    i /= region.extents[d];
  }
  return idx;
}

DenseHankel build_hankel_dense(CTensor const &X, KernelMask const &K, Region const &S) {
  validate_geometry(X.dims(), K, S);
  Index const s = S.s(), n = K.n();
  check_dense_size(s, n);
  DenseHankel H{CMatrix(s, n), {}, S, K};
  H.location.resize(s, n);
  auto const &dims = X.dims();
  auto const st = strides_of(dims);
  for (Index i = 0; i < s; ++i) {
    auto const origin = H.row_origin(i);
    for (Index col = 0; col < n; ++col) {
      auto const pos = K.position(col);
      Index off = 0;
      for (std::size_t d = 0; d < dims.size(); ++d) {
        Index c = origin[d] + pos[d];
        if (S.circular[d])
          c %= dims[d];
        off += c * st[d];
      }
      H.location(i, col) = off;
      H.matrix(i, col) = X[off];
    }
  }
  return H;
}

Eigen::VectorXd hankel_singular_values(CTensor const &X, KernelMask const &K, Region const &S) {
  auto const H = build_hankel_dense(X, K, S);
  Eigen::BDCSVD<CMatrix> svd(H.matrix);
  return svd.singularValues();
}

Index numerical_rank(Eigen::VectorXd const &sv, double rel_tol) {
  if (sv.size() == 0 || sv(0) == 0.0)
    return 0;
  Index r = 0;
  for (Index k = 0; k < sv.size(); ++k)
    if (sv(k) > rel_tol * sv(0))
      ++r;
  return r;
}

double tail_energy_dense(CTensor const &X, KernelMask const &K, Region const &S, Index r) {
  if (r < 0)
    throw RankError("tail_energy_dense: negative rank");
  auto const sv = hankel_singular_values(X, K, S);
  double tail = 0.0;
  for (Index k = r; k < sv.size(); ++k)
    tail += sv(k) * sv(k);
  return tail;
}

CTensor structure_projection(CMatrixCRef H, DenseHankel const &layout, CTensor const &fallback) {
  if (H.rows() != layout.location.rows() || H.cols() != layout.location.cols())
    throw ShapeError("structure_projection: matrix does not match layout");
  CTensor sum(fallback.dims());
  std::vector<Index> count(static_cast<std::size_t>(fallback.size()), 0);
  for (Index col = 0; col < H.cols(); ++col)
    for (Index i = 0; i < H.rows(); ++i) {
      Index const m = layout.location(i, col);
      sum[m] += H(i, col);
      ++count[static_cast<std::size_t>(m)];
    }
  for (Index m = 0; m < sum.size(); ++m) {
    auto const c = count[static_cast<std::size_t>(m)];
    sum[m] = c ? sum[m] / static_cast<double>(c) : fallback[m];
  }
  return sum;
}

CadzowResult cadzow_complete(CTensor const &X0, BinaryMask const &M, KernelMask const &K, Index r, Index iterations,
                             CadzowOptions const &opts) {
  require_same_dims(X0.dims(), M.dims(), "cadzow_complete");
  if (r < 0)
    throw RankError("cadzow_complete: negative rank");
  auto const S = Region::full(X0.dims(), K, opts.circular_axes);
  check_dense_size(S.s(), K.n());
  CadzowResult res{mask_apply(X0, M), {}};
  auto const t0 = std::chrono::steady_clock::now();
  auto H = build_hankel_dense(res.estimate, K, S);
  Index const n = K.n();
  Index const keep = std::min<Index>(r, std::min(S.s(), n));
  for (Index it = 1; it <= iterations; ++it) {
    CMatrix low;
    if (keep < std::min(S.s(), n)) {
      CMatrix const gram = H.matrix.adjoint() * H.matrix;
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
      CMatrix const Vr = eig.eigenvectors().rightCols(keep);
      low = (H.matrix * Vr) * Vr.adjoint();
    } else {
      low = H.matrix;
    }
    auto X = structure_projection(low, H, res.estimate);
    for (Index m = 0; m < X.size(); ++m)
      if (M[m])
        X[m] = X0[m];
    res.estimate = std::move(X);
    for (Index col = 0; col < n; ++col)
      for (Index i = 0; i < S.s(); ++i)
        H.matrix(i, col) = res.estimate[H.location(i, col)];
    if (opts.reference || opts.on_iterate) {
      double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (opts.reference)
        res.trace.push_back({it, secs, ser(*opts.reference, res.estimate)});
      if (opts.on_iterate)
        opts.on_iterate(it, res.estimate);
    }
  }
  return res;
}

namespace {

// Cost evaluated through the explicit matrix, independent of the convolution kernels.
double dense_cost(CTensor const &Y, CMatrixCRef Qt, KernelMask const &K, Region const &S, DataConsistency const &dc) {
  double cost = (build_hankel_dense(Y, K, S).matrix * Qt).squaredNorm();
  if (dc.mode == DcMode::Soft)
    for (Index m = 0; m < Y.size(); ++m)
      cost += dc.lambda * std::norm(((*dc.mask)[m] ? Y[m] : cplx{}) - (*dc.observed)[m]);
  return cost;
}

} // namespace

CTensor gradient_bruteforce(CTensor const &Y, CMatrixCRef Qt, KernelMask const &K, Region const &S,
                            DataConsistency const &dc, double h) {
  if (dc.mode == DcMode::Soft && (!dc.mask || !dc.observed))
    throw ParameterError("soft data consistency needs a mask and observed data");
  if (Y.size() > 4096)
    throw SizeError("gradient_bruteforce: at most 4096 unknowns, got " + std::to_string(Y.size()));
  CTensor g(Y.dims());
  CTensor Yp = Y;
  for (Index m = 0; m < Y.size(); ++m) {
    if (dc.mode == DcMode::Hard && dc.mask && (*dc.mask)[m])
      continue;
    cplx const y = Y[m];
    Yp[m] = y + h;
    double const fre_p = dense_cost(Yp, Qt, K, S, dc);
    Yp[m] = y - h;
    double const fre_m = dense_cost(Yp, Qt, K, S, dc);
    Yp[m] = y + cplx{0.0, h};
    double const fim_p = dense_cost(Yp, Qt, K, S, dc);
    Yp[m] = y - cplx{0.0, h};
    double const fim_m = dense_cost(Yp, Qt, K, S, dc);
    Yp[m] = y;
    double const dre = (fre_p - fre_m) / (2.0 * h);
    double const dim = (fim_p - fim_m) / (2.0 * h);
    g[m] = 0.5 * cplx{dre, dim};
  }
  return g;
}

} // namespace hicu
