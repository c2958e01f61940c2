#pragma once

#include <vector>

#include "hicu/tensor.hpp"

namespace hicu {

/// Binary support of an annihilating kernel inside a box of `extents`.
/// Support positions are enumerated row-major over the box; that order defines the
/// column index of the multi-level Hankel matrix.
class KernelMask {
public:
  /// Full rectangular support.
  static KernelMask rectangular(Dims extents);
  /// Ellipsoid inscribed in the first `spatial_axes` axes; remaining axes keep full support.
  static KernelMask ellipsoid(Dims extents, Index spatial_axes);
  static KernelMask from_support(BinaryMask support);

  Dims const &extents() const { return support_.dims(); }
  BinaryMask const &support() const { return support_; }
  Index rank() const { return support_.rank(); }
  /// Number of support positions (columns of H).
  Index n() const { return static_cast<Index>(positions_.size()) / rank(); }
  /// Multi-index of support column `col`.
  std::span<Index const> position(Index col) const;
  /// Support column of a box position, or -1 when the position is outside the support.
  Index column_of_box(Index box_offset) const { return box_to_col_[static_cast<std::size_t>(box_offset)]; }

private:
  explicit KernelMask(BinaryMask support);

  BinaryMask support_;
  std::vector<Index> positions_; // n * rank, flattened
  std::vector<Index> box_to_col_;
};

/// Contiguous block of valid-convolution output positions.
/// Circular axes wrap modulo the array extent and always span the full extent.
struct Region {
  Dims offsets;
  Dims extents;
  std::vector<bool> circular;

  Index rank() const { return static_cast<Index>(extents.size()); }
  /// Number of output positions s.
  Index s() const { return product(extents); }
  bool is_circular(Index d) const { return circular[static_cast<std::size_t>(d)]; }

  /// Full valid region (N_d - K_d + 1 per non-circular axis, N_d on circular axes).
  static Region full(Dims const &dims, KernelMask const &K, std::vector<Index> const &circular_axes = {});
};

/// Throws ShapeError unless (dims, K, S) describe a valid convolution.
void validate_geometry(Dims const &dims, KernelMask const &K, Region const &S);

/// Precomputed index arithmetic shared by the convolution kernels.
/// For a region row with non-circular base offset `base` and circular coordinate combination
/// `combo`, the array element paired with support column `col` is base + kernel_offset(combo, col).
class ConvGeometry {
public:
  ConvGeometry(Dims const &dims, KernelMask const &K, Region const &S);

  Dims const &dims() const { return dims_; }
  Dims const &strides() const { return strides_; }
  KernelMask const &kernel() const { return *kernel_; }
  Region const &region() const { return *region_; }
  Index n() const { return n_; }
  Index s() const { return s_; }
  Index array_size() const { return array_size_; }

  Index const *kernel_offsets(Index combo) const { return koff_.data() + combo * n_; }

  /// Walks region rows in row-major order, tracking the non-circular base and circular combo.
  class RowWalker {
  public:
    RowWalker(ConvGeometry const &g, Index start_row);
    Index base() const { return base_; }
    Index combo() const { return combo_; }
    void advance();

  private:
    ConvGeometry const *g_;
    Dims coord_;
    Index base_ = 0;
    Index combo_ = 0;
  };

private:
  friend class RowWalker;

  Dims dims_;
  Dims strides_;
  KernelMask const *kernel_;
  Region const *region_;
  Index n_;
  Index s_;
  Index array_size_;
  Dims combo_strides_; // per axis: 0 for non-circular, mixed-radix stride for circular
  Index combos_ = 1;
  std::vector<Index> koff_; // combos * n
};

} // namespace hicu
