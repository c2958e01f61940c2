#include "hicu/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace hicu::kernels {

namespace {

using Stride = Eigen::OuterStride<>;
using TileMap = Eigen::Map<CMatrix, 0, Stride>;
using TileCMap = Eigen::Map<CMatrix const, 0, Stride>;

constexpr Index tile_cols = 32;
constexpr Index micro_rows = 16;
constexpr Index small_micro_rows = 8;
constexpr Index micro_cols = 4;

// Tiles depend on the geometry only, never on the thread count, so every thread count
// performs the same floating-point operations in the same order.
// Small regions get half-height micro-blocks to keep scratch inside the rSVD budget; a row's
// arithmetic does not depend on the block height.
struct Tiling {
  Index rows, cols, micro;
  Tiling(Index s, Index n) {
    cols = std::min(n, tile_cols);
    Index const target = s / (8 * cols);
    micro = target >= micro_rows ? micro_rows : small_micro_rows;
    rows = std::clamp<Index>(target / micro * micro, micro, 64);
  }
  Index values() const { return rows * cols; }
};

// Row origins of region rows [i0, i0 + len).
void walk(ConvGeometry const &g, Index i0, Index len, Index *base, Index const **koff) {
  ConvGeometry::RowWalker w(g, i0);
  for (Index b = 0; b < len; ++b, w.advance()) {
    base[b] = w.base();
    koff[b] = g.kernel_offsets(w.combo());
  }
}

// Rows of a tile usually share one offset table (no circular axis); then the gathers below
// read x[base[b] + o] with a fixed o per column.
bool shared_offsets(Index const *const *koff, Index len) {
  for (Index b = 1; b < len; ++b)
    if (koff[b] != koff[0])
      return false;
  return true;
}

// P(b, c) = X[row b, support column c0 + c], leading dimension ld.
void gather(cplx const *x, Index const *base, Index const *const *koff, Index len, Index c0, Index cw, cplx *P,
            Index ld) {
  if (shared_offsets(koff, len)) {
    for (Index c = 0; c < cw; ++c) {
      cplx const *xc = x + koff[0][c0 + c];
      for (Index b = 0; b < len; ++b)
        P[c * ld + b] = xc[base[b]];
    }
    return;
  }
  for (Index c = 0; c < cw; ++c)
    for (Index b = 0; b < len; ++b)
      P[c * ld + b] = x[base[b] + koff[b][c0 + c]];
}

// Same tile split into real and imaginary planes; rows len..ld are zero.
void gather_planes(cplx const *x, Index const *base, Index const *const *koff, Index len, Index c0, Index cw,
                   double *re, double *im, Index ld) {
  bool const shared = shared_offsets(koff, len);
  for (Index c = 0; c < cw; ++c) {
    double *rc = re + c * ld, *ic = im + c * ld;
    if (shared) {
      auto const *xc = reinterpret_cast<double const *>(x + koff[0][c0 + c]);
      for (Index b = 0; b < len; ++b) {
        rc[b] = xc[2 * base[b]];
        ic[b] = xc[2 * base[b] + 1];
      }
    } else {
      for (Index b = 0; b < len; ++b) {
        cplx const v = x[base[b] + koff[b][c0 + c]];
        rc[b] = v.real();
        ic[b] = v.imag();
      }
    }
    for (Index b = len; b < ld; ++b)
      rc[b] = ic[b] = 0.0;
  }
}

// acc(b, j) = sum_c P(b, c) V(c, j) for MR rows and NB columns. Every row goes through
// the same instruction sequence whatever its position, which keeps sub-region rows bit-equal
// to the full-region rows. The file is built without contraction; fused steps are spelled out.
template <int MR, int NB>
void micro_forward(double const *re, double const *im, Index ld, Index cw, cplx const *v, Index vld, cplx *out,
                   Index old, Index len, bool first) {
  double ar[NB][MR] = {}, ai[NB][MR] = {};
  for (Index c = 0; c < cw; ++c) {
    double const *r = re + c * ld;
    double const *m = im + c * ld;
    for (int j = 0; j < NB; ++j) {
      double const br = v[j * vld + c].real(), bi = v[j * vld + c].imag();
      for (Index b = 0; b < MR; ++b) {
#ifdef __FMA__
        ar[j][b] = std::fma(r[b], br, std::fma(-m[b], bi, ar[j][b]));
        ai[j][b] = std::fma(r[b], bi, std::fma(m[b], br, ai[j][b]));
#else
        ar[j][b] += r[b] * br - m[b] * bi;
        ai[j][b] += r[b] * bi + m[b] * br;
#endif
      }
    }
  }
  for (int j = 0; j < NB; ++j)
    for (Index b = 0; b < len; ++b) {
      cplx const a{ar[j][b], ai[j][b]};
      out[j * old + b] = first ? a : out[j * old + b] + a;
    }
}

// All micro-blocks of one gathered tile against every column of V.
template <int MR>
void micro_sweep(double const *re, double const *im, Index ld, Index len, Index cw, CMatrixCRef V, Index c0,
                 CMatrixRef out, Index i0) {
  Index const k = V.cols(), vld = V.outerStride(), old = out.outerStride();
  for (Index b0 = 0; b0 < len; b0 += MR) {
    Index const bl = std::min<Index>(MR, len - b0);
    cplx *o = out.data() + i0 + b0;
    Index j = 0;
    for (; j + micro_cols <= k; j += micro_cols)
      micro_forward<MR, micro_cols>(re + b0, im + b0, ld, cw, V.data() + j * vld + c0, vld, o + j * old, old, bl,
                                    c0 == 0);
    for (; j < k; ++j)
      micro_forward<MR, 1>(re + b0, im + b0, ld, cw, V.data() + j * vld + c0, vld, o + j * old, old, bl, c0 == 0);
  }
}

} // namespace

Index forward_scratch_values(Index s, Index n) {
  Tiling const t(s, n);
  return (t.values() + t.rows + t.micro * micro_cols) * omp_get_max_threads();
}
Index adjoint_scratch_values(Index s, Index n) {
  Tiling const t(s, n);
  return (t.values() + t.rows) * omp_get_max_threads();
}

namespace omp {

void forward(CTensor const &X, CMatrixCRef V, KernelMask const &K, Region const &S, CMatrixRef out) {
  ConvGeometry const g(X.dims(), K, S);
  Index const n = g.n(), s = g.s();
  Tiling const t(s, n);
  cplx const *x = X.data();
#pragma omp parallel
  {
    std::vector<double> re(static_cast<std::size_t>(t.values())), im(static_cast<std::size_t>(t.values()));
    std::vector<Index> base(static_cast<std::size_t>(t.rows));
    std::vector<Index const *> koff(static_cast<std::size_t>(t.rows));
#pragma omp for schedule(static)
    for (Index bt = 0; bt < (s + t.rows - 1) / t.rows; ++bt) {
      Index const i0 = bt * t.rows, len = std::min(t.rows, s - i0);
      walk(g, i0, len, base.data(), koff.data());
      for (Index c0 = 0; c0 < n; c0 += t.cols) {
        Index const cw = std::min(t.cols, n - c0);
        gather_planes(x, base.data(), koff.data(), len, c0, cw, re.data(), im.data(), t.rows);
        if (t.micro == micro_rows)
          micro_sweep<micro_rows>(re.data(), im.data(), t.rows, len, cw, V, c0, out, i0);
        else
          micro_sweep<small_micro_rows>(re.data(), im.data(), t.rows, len, cw, V, c0, out, i0);
      }
    }
  }
}

// Each thread owns a tile of support columns and sweeps all region rows for it.
void adjoint(CTensor const &X, CMatrixCRef U, KernelMask const &K, Region const &S, CMatrixRef out) {
  ConvGeometry const g(X.dims(), K, S);
  Index const n = g.n(), s = g.s();
  Tiling const t(s, n);
  Index const ctiles = (n + t.cols - 1) / t.cols;
  cplx const *x = X.data();
#pragma omp parallel
  {
    std::vector<cplx> P(static_cast<std::size_t>(t.values()));
    std::vector<Index> base(static_cast<std::size_t>(t.rows));
    std::vector<Index const *> koff(static_cast<std::size_t>(t.rows));
#pragma omp for schedule(static)
    for (Index ct = 0; ct < ctiles; ++ct) {
      Index const c0 = ct * t.cols, cw = std::min(t.cols, n - c0);
      auto O = out.middleRows(c0, cw);
      O.setZero();
      for (Index i0 = 0; i0 < s; i0 += t.rows) {
        Index const len = std::min(t.rows, s - i0);
        walk(g, i0, len, base.data(), koff.data());
        gather(x, base.data(), koff.data(), len, c0, cw, P.data(), t.rows);
        TileCMap const Pm(P.data(), len, cw, Stride(t.rows));
        O.noalias() += Pm.adjoint() * U.middleRows(i0, len);
      }
    }
  }
}

// Tiles T = U_rows q^H_cols are formed in parallel a wave at a time, then added into the
// array serially in tile order.
void scatter(CMatrixCRef q, CMatrixCRef U, KernelMask const &K, Region const &S, CTensor &out) {
  ConvGeometry const g(out.dims(), K, S);
  Index const n = g.n(), s = g.s();
  Tiling const t(s, n);
  Index const ctiles = (n + t.cols - 1) / t.cols;
  Index const tiles = (s + t.rows - 1) / t.rows * ctiles;
  CMatrix const qh = q.adjoint();
  std::fill(out.span().begin(), out.span().end(), cplx{0.0, 0.0});
  cplx *o = out.data();

  Index const wave = std::max(1, omp_get_max_threads());
  std::vector<cplx> T(static_cast<std::size_t>(wave * t.values()));
  std::vector<Index> base(static_cast<std::size_t>(wave * t.rows));
  std::vector<Index const *> koff(static_cast<std::size_t>(wave * t.rows));
  for (Index w0 = 0; w0 < tiles; w0 += wave) {
    Index const count = std::min(wave, tiles - w0);
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < count; ++k) {
      Index const tile = w0 + k;
      Index const i0 = tile / ctiles * t.rows, len = std::min(t.rows, s - i0);
      Index const c0 = tile % ctiles * t.cols, cw = std::min(t.cols, n - c0);
      walk(g, i0, len, base.data() + k * t.rows, koff.data() + k * t.rows);
      TileMap Tm(T.data() + k * t.values(), len, cw, Stride(t.rows));
      Tm.noalias() = U.middleRows(i0, len) * qh.middleCols(c0, cw);
    }
    for (Index k = 0; k < count; ++k) {
      Index const tile = w0 + k;
      Index const i0 = tile / ctiles * t.rows, len = std::min(t.rows, s - i0);
      Index const c0 = tile % ctiles * t.cols, cw = std::min(t.cols, n - c0);
      cplx const *Tk = T.data() + k * t.values();
      Index const *bk = base.data() + k * t.rows;
      Index const *const *kk = koff.data() + k * t.rows;
      for (Index c = 0; c < cw; ++c)
        for (Index b = 0; b < len; ++b)
          o[bk[b] + kk[b][c0 + c]] += Tk[c * t.rows + b];
    }
  }
}

} // namespace omp
} // namespace hicu::kernels
