#include "hicu/subspace.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace hicu {

Index sketch_width_for_rank(Index r) { return (3 * r + 1) / 2; }

namespace {

// Columns processed per convolution batch inside the range finder. Sketch and range blocks are
// allocated and released per batch so the range basis is never held alongside a full n x l
// matrix.
constexpr Index rsvd_block = 8;

using Blocks = std::vector<CMatrix>;

// CGS2 over columns given by pointer; each column has `rows` contiguous entries.
void orthonormalize_ptrs(std::vector<cplx *> const &cols, Index rows) {
  Index const m = static_cast<Index>(cols.size());
  std::vector<cplx> coef(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    cplx *const aj = cols[static_cast<std::size_t>(j)];
    for (int pass = 0; pass < 2 && j > 0; ++pass) {
#pragma omp parallel for schedule(static)
      for (Index i = 0; i < j; ++i) {
        cplx const *const ai = cols[static_cast<std::size_t>(i)];
        cplx acc{0.0, 0.0};
        for (Index t = 0; t < rows; ++t)
          acc += std::conj(ai[t]) * aj[t];
        coef[static_cast<std::size_t>(i)] = acc;
      }
#pragma omp parallel for schedule(static)
      for (Index t = 0; t < rows; ++t) {
        cplx acc{0.0, 0.0};
        for (Index i = 0; i < j; ++i)
          acc += cols[static_cast<std::size_t>(i)][t] * coef[static_cast<std::size_t>(i)];
        aj[t] -= acc;
      }
    }
    double nrm = 0.0;
    for (Index t = 0; t < rows; ++t)
      nrm += std::norm(aj[t]);
    nrm = std::sqrt(nrm);
    if (nrm > 0.0)
      for (Index t = 0; t < rows; ++t)
        aj[t] /= nrm;
  }
}

void orthonormalize_blocks(Blocks &blocks) {
  std::vector<cplx *> cols;
  Index rows = 0;
  for (auto &b : blocks) {
    rows = b.rows();
    for (Index j = 0; j < b.cols(); ++j)
      cols.push_back(b.data() + j * b.rows());
  }
  orthonormalize_ptrs(cols, rows);
}

} // namespace

void orthonormalize_columns(CMatrixRef A) {
  std::vector<cplx *> cols;
  for (Index j = 0; j < A.cols(); ++j)
    cols.push_back(A.data() + j * A.outerStride());
  orthonormalize_ptrs(cols, A.rows());
}

RsvdResult rsvd_right_vectors(CTensor const &X, KernelMask const &K, Region const &S, Index r, RngStream const &rng,
                              RsvdOptions const &opts) {
  validate_geometry(X.dims(), K, S);
  Index const n = K.n(), s = S.s();
  if (r < 0 || r >= n)
    throw RankError("rsvd: rank " + std::to_string(r) + " must satisfy 0 <= r < n = " + std::to_string(n));
  Index const l = sketch_width_for_rank(r);
  if (l > s)
    throw SketchError("rsvd: sketch width " + std::to_string(l) + " exceeds region size " + std::to_string(s));
  RsvdResult res;
  res.sketch_width = l;
  if (r == 0) {
    res.V = CMatrix(n, 0);
    return res;
  }

  AuxMemoryMeter meter;
  auto const values = [](Index v) { return static_cast<std::uint64_t>(v); };
  auto const drop = [&](CMatrix &m) {
    meter.release(values(m.size()));
    m.resize(0, 0);
  };
  auto const fwd_scratch = values(kernels::forward_scratch_values(s, n));
  auto const adj_scratch = values(kernels::adjoint_scratch_values(s, n));

  // Maps every block of `in` through `op`, releasing each input block once its image exists.
  auto const map_blocks = [&](Blocks &in, Index out_rows, std::uint64_t scratch, auto op) {
    Blocks out;
    for (auto &b : in) {
      meter.acquire(values(out_rows * b.cols()) + scratch);
      out.push_back(op(b));
      meter.release(scratch);
      drop(b);
    }
    in.clear();
    return out;
  };
  auto const forward = [&](CMatrix const &b) { return hankel_apply(X, b, K, S); };
  auto const adjoint = [&](CMatrix const &b) { return hankel_adjoint_apply(X, b, K, S); };

  Rng gen(rng);
  Blocks Z;
  for (Index j0 = 0; j0 < l; j0 += rsvd_block) {
    Index const w = std::min(rsvd_block, l - j0);
    CMatrix omega(n, w);
    for (Index j = 0; j < w; ++j)
      for (Index i = 0; i < n; ++i)
        omega(i, j) = gen.complex_normal(1.0);
    meter.acquire(values(omega.size()));
    Blocks one{std::move(omega)};
    auto img = map_blocks(one, s, fwd_scratch, forward);
    Z.push_back(std::move(img.front()));
  }

  auto const ortho = [&](Blocks &b) {
    meter.acquire(values(l));
    orthonormalize_blocks(b);
    meter.release(values(l));
  };
  for (int q = 0; q < opts.power_iterations; ++q) {
    ortho(Z);
    Blocks W = map_blocks(Z, n, adj_scratch, adjoint);
    ortho(W);
    Z = map_blocks(W, s, fwd_scratch, forward);
  }
  ortho(Z);
  Blocks Wb = map_blocks(Z, n, adj_scratch, adjoint);

  CMatrix W(n, l);
  meter.acquire(values(W.size()));
  Index j0 = 0;
  for (auto &b : Wb) {
    W.middleCols(j0, b.cols()) = b;
    j0 += b.cols();
    drop(b);
  }

  // Dense SVD workspace: QR-preconditioned copy of W, thin U, and the l x l factors.
  meter.acquire(values(2 * n * l + 2 * l * l));
  Eigen::JacobiSVD<CMatrix> svd(W, Eigen::ComputeThinU);
  res.V = svd.matrixU().leftCols(r);
  res.peak_aux_values = meter.peak();
  return res;
}

NullspaceBasis householder_nullspace(CMatrixCRef V) {
  Index const n = V.rows(), r = V.cols();
  if (r > n)
    throw RankError("householder_nullspace: more vectors than dimensions");
  CMatrix A = V;
  std::vector<Eigen::VectorXcd> vs(static_cast<std::size_t>(r));
  std::vector<cplx> taus(static_cast<std::size_t>(r));
  for (Index k = 0; k < r; ++k) {
    Index const len = n - k;
    cplx const alpha = A(k, k);
    double const tail = len > 1 ? A.col(k).tail(len - 1).squaredNorm() : 0.0;
    double const beta = std::sqrt(std::norm(alpha) + tail);
    if (beta < 1e-12)
      throw DegenerateInputError("householder_nullspace: column " + std::to_string(k) +
                                 " vanishes after projection (rank-deficient V)");
    // alpha - beta, without cancellation when alpha is close to +beta.
    cplx const d = alpha.real() > 0.0 ? cplx{-(alpha.imag() * alpha.imag() + tail) / (alpha.real() + beta), alpha.imag()}
                                      : alpha - beta;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(len);
    v(0) = 1.0;
    cplx tau{0.0, 0.0};
    if (d != cplx{0.0, 0.0}) {
      tau = -d / beta;
      v.tail(len - 1) = A.col(k).tail(len - 1) / d;
      auto block = A.bottomRightCorner(len, r - k);
      Eigen::RowVectorXcd const w = v.adjoint() * block;
      block.noalias() -= std::conj(tau) * v * w;
    }
    vs[static_cast<std::size_t>(k)] = std::move(v);
    taus[static_cast<std::size_t>(k)] = tau;
  }
  // H_k^H maps column k to beta e_k, so V = H_1 ... H_r R and Q = H_1 ... H_r [0; I].
  NullspaceBasis nb;
  nb.r = r;
  nb.Q = CMatrix::Zero(n, n - r);
  nb.Q.bottomRows(n - r).setIdentity();
  for (Index k = r; k-- > 0;) {
    auto const &v = vs[static_cast<std::size_t>(k)];
    cplx const tau = taus[static_cast<std::size_t>(k)];
    if (tau == cplx{0.0, 0.0})
      continue;
    auto block = nb.Q.bottomRows(n - k);
    Eigen::RowVectorXcd const w = v.adjoint() * block;
    block.noalias() -= tau * v * w;
  }
  return nb;
}

CMatrix jl_compress(CMatrixCRef Q, Index p, RngStream const &rng) {
  if (p < 1)
    throw ParameterError("jl_compress: p must be >= 1, got " + std::to_string(p));
  if (Q.cols() < 1)
    throw ParameterError("jl_compress: empty nullspace");
  CMatrix const P = complex_gaussian_matrix(Q.cols(), p, 1.0 / static_cast<double>(p), rng);
  return Q * P;
}

double subspace_angle(CMatrixCRef A, CMatrixCRef B) {
  if (A.rows() != B.rows())
    throw ShapeError("subspace_angle: row mismatch");
  CMatrix const resid = B - A * (A.adjoint() * B);
  Eigen::JacobiSVD<CMatrix> svd(resid);
  double const smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return std::asin(std::min(1.0, smax));
}

} // namespace hicu
