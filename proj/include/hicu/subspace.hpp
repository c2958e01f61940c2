#pragma once

#include "hicu/hankel.hpp"
#include "hicu/rng.hpp"

namespace hicu {

struct RsvdOptions {
  /// Extra H^H H passes for slowly decaying spectra. Zero keeps the 3/2 r application budget.
  int power_iterations = 0;
};

struct RsvdResult {
  /// n x r, orthonormal columns: approximate principal right singular vectors of H.
  CMatrix V;
  /// Sketch width ceil(1.5 r).
  Index sketch_width = 0;
  /// High-water mark of auxiliary complex values held during the computation.
  std::uint64_t peak_aux_values = 0;
};

Index sketch_width_for_rank(Index r);

/// Single-pass randomized range finder on H = H_K(X) restricted to S.
/// Performs exactly ceil(1.5 r) forward and ceil(1.5 r) adjoint convolutions (times
/// 1 + power_iterations); H is never formed.
RsvdResult rsvd_right_vectors(CTensor const &X, KernelMask const &K, Region const &S, Index r, RngStream const &rng,
                              RsvdOptions const &opts = {});

/// Orthonormal complement of span(V), n x (n - r).
struct NullspaceBasis {
  CMatrix Q;
  Index r = 0;
  Index n() const { return Q.rows(); }
};

/// Complement of V (n x r, orthonormal columns) from r complex Householder reflections.
/// Each reflector maps its pivot column to a nonnegative real multiple of the unit vector.
NullspaceBasis householder_nullspace(CMatrixCRef V);

/// Qt = Q P with P an (n - r) x p complex Gaussian matrix of per-entry variance 1/p.
CMatrix jl_compress(CMatrixCRef Q, Index p, RngStream const &rng);

/// In-place orthonormalization of the columns of A by classical Gram-Schmidt with one
/// reorthogonalization pass. Deterministic for any thread count.
void orthonormalize_columns(CMatrixRef A);

/// Largest principal angle (radians) between the column spans of two orthonormal matrices.
double subspace_angle(CMatrixCRef A, CMatrixCRef B);

} // namespace hicu
