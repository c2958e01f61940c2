#pragma once

#include <Eigen/Dense>

#include "hicu/geometry.hpp"

namespace hicu {

using CMatrix = Eigen::MatrixXcd;
using CMatrixRef = Eigen::Ref<CMatrix>;
using CMatrixCRef = Eigen::Ref<CMatrix const>;

/// Raw multi-level Hankel convolution kernels. They validate nothing beyond what the
/// index arithmetic needs and do not touch the instrumented counters; use hankel.hpp instead.
///
/// `serial` is the reference: each loop follows the defining sum with explicit multi-index
/// arithmetic. `omp` is the production path: gathered patch tiles fed to dense products. Tile
/// shapes depend on (s, n) only and partial sums are combined in a fixed order, so results are
/// bit-identical across thread counts.
namespace kernels {

namespace serial {
/// out(i, j) = sum_col X[i + pos(col)] V(col, j)
void forward(CTensor const &X, CMatrixCRef V, KernelMask const &K, Region const &S, CMatrixRef out);
/// out(col, j) = sum_i conj(X[i + pos(col)]) U(i, j)
void adjoint(CTensor const &X, CMatrixCRef U, KernelMask const &K, Region const &S, CMatrixRef out);
/// out[m] = sum_j sum_{i, col : i + pos(col) = m} conj(q(col, j)) U(i, j)
void scatter(CMatrixCRef q, CMatrixCRef U, KernelMask const &K, Region const &S, CTensor &out);
} // namespace serial

namespace omp {
void forward(CTensor const &X, CMatrixCRef V, KernelMask const &K, Region const &S, CMatrixRef out);
void adjoint(CTensor const &X, CMatrixCRef U, KernelMask const &K, Region const &S, CMatrixRef out);
void scatter(CMatrixCRef q, CMatrixCRef U, KernelMask const &K, Region const &S, CTensor &out);
} // namespace omp

/// Complex values of scratch held by the omp kernels (all threads) for s rows and n columns.
Index forward_scratch_values(Index s, Index n);
Index adjoint_scratch_values(Index s, Index n);

} // namespace kernels
} // namespace hicu
