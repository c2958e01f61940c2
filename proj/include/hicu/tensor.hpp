#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hicu/errors.hpp"

namespace hicu {

using Index = std::int64_t;
using cplx = std::complex<double>;
using Dims = std::vector<Index>;

Index product(std::span<Index const> dims);
std::string to_string(std::span<Index const> dims);

/// Row-major strides (last dimension fastest).
Dims strides_of(std::span<Index const> dims);

/// Dense N-dimensional array, row-major with the last dimension varying fastest.
/// Axis order convention for k-space: [spatial..., time (optional), coil].
template <typename T> class Tensor {
public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Dims dims, T fill = T{}) : dims_{std::move(dims)} {
    validate_dims(dims_);
    data_.assign(static_cast<std::size_t>(product(dims_)), fill);
  }
  Tensor(Dims dims, std::vector<T> data) : dims_{std::move(dims)}, data_{std::move(data)} {
    validate_dims(dims_);
    if (static_cast<Index>(data_.size()) != product(dims_))
      throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match dims " +
                       to_string(dims_));
  }

  Dims const &dims() const { return dims_; }
  Index rank() const { return static_cast<Index>(dims_.size()); }
  Index dim(Index axis) const { return dims_.at(static_cast<std::size_t>(axis)); }
  Index size() const { return static_cast<Index>(data_.size()); }

  T *data() { return data_.data(); }
  T const *data() const { return data_.data(); }
  std::span<T> span() { return data_; }
  std::span<T const> span() const { return data_; }
  std::vector<T> const &values() const { return data_; }

  T &operator[](Index i) { return data_[static_cast<std::size_t>(i)]; }
  T const &operator[](Index i) const { return data_[static_cast<std::size_t>(i)]; }

  Index offset(std::span<Index const> idx) const {
    Index off = 0;
    for (std::size_t d = 0; d < dims_.size(); ++d)
      off = off * dims_[d] + idx[d];
    return off;
  }
  T &at(std::initializer_list<Index> idx) { return data_[static_cast<std::size_t>(offset(std::span(idx.begin(), idx.size())))]; }
  T const &at(std::initializer_list<Index> idx) const {
    return data_[static_cast<std::size_t>(offset(std::span(idx.begin(), idx.size())))];
  }

  bool operator==(Tensor const &) const = default;

private:
  static void validate_dims(Dims const &dims) {
    if (dims.empty())
      throw ShapeError("tensor needs at least one dimension");
    for (auto d : dims)
      if (d < 1)
        throw ShapeError("tensor extents must be >= 1, got " + to_string(dims));
  }

  Dims dims_;
  std::vector<T> data_;
};

using CTensor = Tensor<cplx>;
using RTensor = Tensor<double>;
/// {0,1}-valued sampling or support mask.
using BinaryMask = Tensor<std::uint8_t>;

void require_same_dims(std::span<Index const> a, std::span<Index const> b, char const *what);

/// Frobenius norms and inner products, summed serially so results do not depend on thread count.
double norm_sq(std::span<cplx const> x);
double norm(std::span<cplx const> x);
double norm_sq(std::span<double const> x);
/// <a, b> = sum conj(a) b
cplx inner(std::span<cplx const> a, std::span<cplx const> b);

/// Elementwise gating: out[j] = M[j] ? X[j] : 0.
CTensor mask_apply(CTensor const &X, BinaryMask const &M);
BinaryMask validate_mask(BinaryMask M);
Index count_ones(BinaryMask const &M);

/// Centered sub-array with offset floor((N - S)/2) along each axis.
template <typename T> Tensor<T> crop_center(Tensor<T> const &X, Dims const &sub_dims);
/// Inverse of crop_center: places X at the centered offset of a zero tensor of `dims`.
template <typename T> Tensor<T> embed_center(Tensor<T> const &X, Dims const &dims);
Dims center_offsets(std::span<Index const> dims, std::span<Index const> sub_dims);

/// Centered unitary DFTs (DC at index floor(N/2)) along the listed axes.
CTensor ifft_image(CTensor const &K, std::vector<Index> const &spatial_axes);
CTensor fft_kspace(CTensor const &img, std::vector<Index> const &spatial_axes);

/// Square-root sum of squares over `coil_axis` (default: last axis). Drops the coil axis;
/// a rank-1 input yields a rank-1 tensor of extent 1.
RTensor ssos_combine(CTensor const &images, Index coil_axis = -1);

CTensor operator+(CTensor const &a, CTensor const &b);
CTensor operator-(CTensor const &a, CTensor const &b);
CTensor operator*(cplx a, CTensor const &b);

} // namespace hicu
