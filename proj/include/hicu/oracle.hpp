#pragma once

#include <functional>
#include <optional>

#include "hicu/hankel.hpp"

namespace hicu {

/// Maximum s * n entries the dense oracle will materialize. Default 2^24;
/// the HICU_DENSE_THRESHOLD environment variable overrides it.
Index dense_threshold();

/// Explicit multi-level Hankel matrix: entry (i, col) = X[i + pos(col)], wrapping circular axes.
struct DenseHankel {
  CMatrix matrix;
  /// Linear array index that entry (i, col) was read from.
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> location;
  /// Multi-index of output row i (absolute array coordinates of the window origin).
  Dims row_origin(Index i) const;
  /// Multi-index of support column col within the kernel box.
  std::span<Index const> column_position(Index col) const { return kernel.position(col); }

  Region region;
  KernelMask kernel;
};

DenseHankel build_hankel_dense(CTensor const &X, KernelMask const &K, Region const &S);

/// Singular values of the dense Hankel matrix, descending.
Eigen::VectorXd hankel_singular_values(CTensor const &X, KernelMask const &K, Region const &S);

/// Number of singular values above rel_tol * sigma_1.
Index numerical_rank(Eigen::VectorXd const &sv, double rel_tol = 1e-9);

/// sum_{k > r} sigma_k^2 of the dense Hankel matrix.
double tail_energy_dense(CTensor const &X, KernelMask const &K, Region const &S, Index r);

/// Averages Hankel-structured entries back onto the array ("de-lift"). Locations not covered by
/// any window keep their value from `fallback`.
CTensor structure_projection(CMatrixCRef H, DenseHankel const &layout, CTensor const &fallback);

struct CadzowTracePoint {
  Index iteration = 0;
  double seconds = 0.0;
  double ser_db = 0.0;
};

struct CadzowOptions {
  std::vector<Index> circular_axes;
  /// When set, SER against this reference is recorded after every iteration.
  CTensor const *reference = nullptr;
  /// Called after every iteration with the current estimate.
  std::function<void(Index, CTensor const &)> on_iterate;
};

struct CadzowResult {
  CTensor estimate;
  std::vector<CadzowTracePoint> trace;
};

/// SAKE-style baseline: lift, truncate to rank r, de-lift by averaging, re-impose observed data.
/// The truncation uses the eigenvectors of the n x n Gram matrix H^H H, which are the right
/// singular vectors of H.
CadzowResult cadzow_complete(CTensor const &X0, BinaryMask const &M, KernelMask const &K, Index r, Index iterations,
                             CadzowOptions const &opts = {});

/// Central-difference Wirtinger gradient of compressed_cost, h = 1e-6. At most 4096 unknowns.
CTensor gradient_bruteforce(CTensor const &Y, CMatrixCRef Qt, KernelMask const &K, Region const &S,
                            DataConsistency const &dc, double h = 1e-6);

} // namespace hicu
