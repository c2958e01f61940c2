#include "hicu/hankel.hpp"

namespace hicu {

namespace {

void check_observation(Dims const &dims, DataConsistency const &dc) {
  if (dc.mask)
    require_same_dims(dims, dc.mask->dims(), "data consistency mask");
  if (dc.mode == DcMode::Soft) {
    if (!dc.mask || !dc.observed)
      throw ParameterError("soft data consistency needs a mask and observed data");
    require_same_dims(dims, dc.observed->dims(), "observed data");
  }
}

// Soft-mode residual M o Y - X0.
CTensor data_residual(CTensor const &Y, DataConsistency const &dc) {
  CTensor r(Y.dims());
  auto const &M = *dc.mask;
  auto const &X0 = *dc.observed;
  for (Index j = 0; j < Y.size(); ++j)
    r[j] = (M[j] ? Y[j] : cplx{}) - X0[j];
  return r;
}

double residual_energy(CMatrixCRef R) {
  double e = 0.0;
  for (Index j = 0; j < R.cols(); ++j)
    for (Index i = 0; i < R.rows(); ++i)
      e += std::norm(R(i, j));
  return e;
}

} // namespace

CMatrix hankel_apply(CTensor const &X, CMatrixCRef V, KernelMask const &K, Region const &S) {
  validate_geometry(X.dims(), K, S);
  if (V.rows() != K.n())
    throw ShapeError("hankel_apply: V has " + std::to_string(V.rows()) + " rows, kernel support has " +
                     std::to_string(K.n()));
  CMatrix out(S.s(), V.cols());
  kernels::omp::forward(X, V, K, S, out);
  detail::count_forward(static_cast<std::uint64_t>(V.cols()));
  return out;
}

CMatrix hankel_adjoint_apply(CTensor const &X, CMatrixCRef U, KernelMask const &K, Region const &S) {
  validate_geometry(X.dims(), K, S);
  if (U.rows() != S.s())
    throw ShapeError("hankel_adjoint_apply: U has " + std::to_string(U.rows()) + " rows, region has " +
                     std::to_string(S.s()));
  CMatrix out(K.n(), U.cols());
  kernels::omp::adjoint(X, U, K, S, out);
  detail::count_adjoint(static_cast<std::uint64_t>(U.cols()));
  return out;
}

CTensor kspace_adjoint_scatter(CMatrixCRef q, CMatrixCRef U, KernelMask const &K, Region const &S, Dims const &dims) {
  validate_geometry(dims, K, S);
  if (q.rows() != K.n() || U.rows() != S.s() || q.cols() != U.cols())
    throw ShapeError("kspace_adjoint_scatter: q is " + std::to_string(q.rows()) + "x" + std::to_string(q.cols()) +
                     ", U is " + std::to_string(U.rows()) + "x" + std::to_string(U.cols()));
  CTensor out(dims);
  kernels::omp::scatter(q, U, K, S, out);
  detail::count_scatter(static_cast<std::uint64_t>(q.cols()));
  return out;
}

ObjectiveGradient objective_and_gradient(CTensor const &Y, CMatrixCRef Qt, KernelMask const &K, Region const &S,
                                         DataConsistency const &dc) {
  check_observation(Y.dims(), dc);
  ObjectiveGradient res;
  res.residuals = hankel_apply(Y, Qt, K, S);
  res.objective = residual_energy(res.residuals);
  res.gradient = kspace_adjoint_scatter(Qt, res.residuals, K, S, Y.dims());
  if (dc.mode == DcMode::Soft) {
    auto const r = data_residual(Y, dc);
    auto const &M = *dc.mask;
    res.objective += dc.lambda * norm_sq(r.span());
    for (Index j = 0; j < Y.size(); ++j)
      if (M[j])
        res.gradient[j] += dc.lambda * r[j];
  } else if (dc.mask) {
    auto const &M = *dc.mask;
    for (Index j = 0; j < Y.size(); ++j)
      if (M[j])
        res.gradient[j] = cplx{0.0, 0.0};
  }
  return res;
}

LineSearch exact_line_search(CTensor const &Y, CTensor const &g, CMatrixCRef Qt, CMatrixCRef residuals,
                             KernelMask const &K, Region const &S, DataConsistency const &dc) {
  require_same_dims(Y.dims(), g.dims(), "exact_line_search");
  check_observation(Y.dims(), dc);
  if (residuals.rows() != S.s() || residuals.cols() != Qt.cols())
    throw ShapeError("exact_line_search: residuals do not match H(Y) Qt");
  CMatrix const w = hankel_apply(g, Qt, K, S);
  LineSearch ls;
  for (Index j = 0; j < w.cols(); ++j)
    for (Index i = 0; i < w.rows(); ++i) {
      ls.numerator += std::real(std::conj(w(i, j)) * residuals(i, j));
      ls.denominator += std::norm(w(i, j));
    }
  if (dc.mode == DcMode::Soft) {
    auto const r = data_residual(Y, dc);
    auto const &M = *dc.mask;
    double num = 0.0, den = 0.0;
    for (Index j = 0; j < Y.size(); ++j)
      if (M[j]) {
        num += std::real(std::conj(g[j]) * r[j]);
        den += std::norm(g[j]);
      }
    ls.numerator += dc.lambda * num;
    ls.denominator += dc.lambda * den;
  }
  if (!(ls.denominator > 0.0))
    throw DegenerateDirectionError("exact line search: direction is annihilated by every kernel");
  ls.step = ls.numerator / ls.denominator;
  return ls;
}

LineSearch exact_line_search(CTensor const &Y, CTensor const &g, CMatrixCRef Qt, KernelMask const &K, Region const &S,
                             DataConsistency const &dc) {
  CMatrix const u = hankel_apply(Y, Qt, K, S);
  return exact_line_search(Y, g, Qt, u, K, S, dc);
}

double compressed_cost(CTensor const &Y, CMatrixCRef Qt, KernelMask const &K, Region const &S,
                       DataConsistency const &dc) {
  check_observation(Y.dims(), dc);
  validate_geometry(Y.dims(), K, S);
  CMatrix u(S.s(), Qt.cols());
  kernels::omp::forward(Y, Qt, K, S, u);
  double cost = residual_energy(u);
  if (dc.mode == DcMode::Soft)
    cost += dc.lambda * norm_sq(data_residual(Y, dc).span());
  return cost;
}

} // namespace hicu
