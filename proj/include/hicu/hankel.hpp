#pragma once

#include "hicu/counters.hpp"
#include "hicu/kernels.hpp"

namespace hicu {

/// H(X) V: batched valid convolution of X with the k kernels stored as columns of V (n x k).
/// Sliding inner product, no kernel flip and no conjugation. Returns s x k; rows follow the
/// region in row-major order. Counts k forward convolutions.
CMatrix hankel_apply(CTensor const &X, CMatrixCRef V, KernelMask const &K, Region const &S);

/// H(X)^H U for U of size s x k. Returns n x k. Counts k adjoint convolutions.
CMatrix hankel_adjoint_apply(CTensor const &X, CMatrixCRef U, KernelMask const &K, Region const &S);

/// Adjoint of X -> H(X) q, summed over the k columns of q (n x k) and U (s x k):
/// out[m] = sum_j sum_{i + pos(col) = m} conj(q(col, j)) U(i, j). Counts k scatter convolutions.
CTensor kspace_adjoint_scatter(CMatrixCRef q, CMatrixCRef U, KernelMask const &K, Region const &S, Dims const &dims);

enum class DcMode { Hard, Soft };

/// Data-consistency term. Non-owning: the mask and observations must outlive the value.
/// Hard mode with no mask applies no gradient zeroing.
struct DataConsistency {
  DcMode mode = DcMode::Hard;
  double lambda = 0.0;
  BinaryMask const *mask = nullptr;
  CTensor const *observed = nullptr;

  static DataConsistency none() { return {}; }
  static DataConsistency hard(BinaryMask const &M) { return {DcMode::Hard, 0.0, &M, nullptr}; }
  static DataConsistency soft(BinaryMask const &M, CTensor const &X0, double lambda) {
    return {DcMode::Soft, lambda, &M, &X0};
  }
};

struct ObjectiveGradient {
  CTensor gradient;
  double objective = 0.0;
  /// H(Y) Qt, kept for the line search.
  CMatrix residuals;
};

/// obj = sum_k ||H(Y) qt_k||^2 (+ lambda ||M o Y - X0||^2 in soft mode) and its Wirtinger
/// gradient d/d(conj Y) without the factor 2. Hard mode zeroes the gradient at observed samples.
/// p forward and p scatter convolutions.
ObjectiveGradient objective_and_gradient(CTensor const &Y, CMatrixCRef Qt, KernelMask const &K, Region const &S,
                                         DataConsistency const &dc);

/// Cost along Y - eta g as the quadratic a - 2 eta b + eta^2 c.
struct LineSearch {
  double step = 0.0;
  double numerator = 0.0;   // b
  double denominator = 0.0; // c
  /// Cost after the step: a - b^2 / c.
  double cost_after(double cost_before) const { return cost_before - step * numerator; }
};

/// Exact minimizer of cost(Y - eta g) for the compressed objective. `residuals` are H(Y) Qt
/// from objective_and_gradient. p forward convolutions. Throws DegenerateDirectionError when
/// g is annihilated by every kernel (zero denominator).
LineSearch exact_line_search(CTensor const &Y, CTensor const &g, CMatrixCRef Qt, CMatrixCRef residuals,
                             KernelMask const &K, Region const &S, DataConsistency const &dc);

/// Convenience overload that recomputes H(Y) Qt (p extra forward convolutions).
LineSearch exact_line_search(CTensor const &Y, CTensor const &g, CMatrixCRef Qt, KernelMask const &K, Region const &S,
                             DataConsistency const &dc);

/// Compressed cost sum_k ||H(Y) qt_k||^2 plus the soft data term; uncounted, for audits and tests.
double compressed_cost(CTensor const &Y, CMatrixCRef Qt, KernelMask const &K, Region const &S,
                       DataConsistency const &dc);

} // namespace hicu
