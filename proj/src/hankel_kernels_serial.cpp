#include "hicu/kernels.hpp"

namespace hicu::kernels::serial {

namespace {

// Linear offset of (row multi-index of S) + (kernel position), wrapping circular axes.
Index element_offset(Dims const &dims, Dims const &strides, Region const &S, Dims const &row, std::span<Index const> pos) {
  Index off = 0;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    Index c = S.offsets[d] + row[d] + pos[d];
    if (S.circular[d])
      c %= dims[d];
    off += c * strides[d];
  }
  return off;
}

void next_row(Region const &S, Dims &row) {
  for (std::size_t d = row.size(); d-- > 0;) {
    if (++row[d] < S.extents[d])
      return;
    row[d] = 0;
  }
}

} // namespace

void forward(CTensor const &X, CMatrixCRef V, KernelMask const &K, Region const &S, CMatrixRef out) {
  validate_geometry(X.dims(), K, S);
  auto const st = strides_of(X.dims());
  Dims row(X.dims().size(), 0);
  out.setZero();
  for (Index i = 0; i < S.s(); ++i, next_row(S, row))
    for (Index j = 0; j < V.cols(); ++j) {
      cplx acc{0.0, 0.0};
      for (Index col = 0; col < K.n(); ++col)
        acc += X[element_offset(X.dims(), st, S, row, K.position(col))] * V(col, j);
      out(i, j) = acc;
    }
}

void adjoint(CTensor const &X, CMatrixCRef U, KernelMask const &K, Region const &S, CMatrixRef out) {
  validate_geometry(X.dims(), K, S);
  auto const st = strides_of(X.dims());
  out.setZero();
  for (Index col = 0; col < K.n(); ++col)
    for (Index j = 0; j < U.cols(); ++j) {
      Dims row(X.dims().size(), 0);
      cplx acc{0.0, 0.0};
      for (Index i = 0; i < S.s(); ++i, next_row(S, row))
        acc += std::conj(X[element_offset(X.dims(), st, S, row, K.position(col))]) * U(i, j);
      out(col, j) = acc;
    }
}

void scatter(CMatrixCRef q, CMatrixCRef U, KernelMask const &K, Region const &S, CTensor &out) {
  validate_geometry(out.dims(), K, S);
  auto const st = strides_of(out.dims());
  for (auto &v : out.span())
    v = cplx{0.0, 0.0};
  for (Index j = 0; j < q.cols(); ++j) {
    Dims row(out.dims().size(), 0);
    for (Index i = 0; i < S.s(); ++i, next_row(S, row))
      for (Index col = 0; col < K.n(); ++col)
        out[element_offset(out.dims(), st, S, row, K.position(col))] += std::conj(q(col, j)) * U(i, j);
  }
}

} // namespace hicu::kernels::serial
