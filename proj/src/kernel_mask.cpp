#include "hicu/geometry.hpp"

#include <algorithm>

namespace hicu {

KernelMask::KernelMask(BinaryMask support) : support_{validate_mask(std::move(support))} {
  auto const &ext = support_.dims();
  auto const nd = ext.size();
  box_to_col_.assign(static_cast<std::size_t>(support_.size()), -1);
  Dims idx(nd, 0);
  for (Index b = 0; b < support_.size(); ++b) {
    if (support_[b]) {
      box_to_col_[static_cast<std::size_t>(b)] = static_cast<Index>(positions_.size() / nd);
      positions_.insert(positions_.end(), idx.begin(), idx.end());
    }
    for (std::size_t d = nd; d-- > 0;) {
      if (++idx[d] < ext[d])
        break;
      idx[d] = 0;
    }
  }
  if (positions_.empty())
    throw ShapeError("kernel support must contain at least one position");
}

KernelMask KernelMask::rectangular(Dims extents) { return KernelMask(BinaryMask(std::move(extents), 1)); }

KernelMask KernelMask::ellipsoid(Dims extents, Index spatial_axes) {
  BinaryMask sup(extents, 0);
  auto const nd = extents.size();
  spatial_axes = std::clamp<Index>(spatial_axes, 0, static_cast<Index>(nd));
  Dims idx(nd, 0);
  for (Index b = 0; b < sup.size(); ++b) {
    double r2 = 0.0;
    for (Index d = 0; d < spatial_axes; ++d) {
      double const half = extents[static_cast<std::size_t>(d)] / 2.0;
      double const u = (idx[static_cast<std::size_t>(d)] + 0.5 - half) / half;
      r2 += u * u;
    }
    sup[b] = r2 <= 1.0 ? 1 : 0;
    for (std::size_t d = nd; d-- > 0;) {
      if (++idx[d] < extents[d])
        break;
      idx[d] = 0;
    }
  }
  return KernelMask(std::move(sup));
}

KernelMask KernelMask::from_support(BinaryMask support) { return KernelMask(std::move(support)); }

std::span<Index const> KernelMask::position(Index col) const {
  auto const nd = static_cast<std::size_t>(rank());
  return {positions_.data() + static_cast<std::size_t>(col) * nd, nd};
}

Region Region::full(Dims const &dims, KernelMask const &K, std::vector<Index> const &circular_axes) {
  if (static_cast<Index>(dims.size()) != K.rank())
    throw ShapeError("kernel rank " + std::to_string(K.rank()) + " does not match array dims " + to_string(dims));
  Region S;
  auto const nd = dims.size();
  S.offsets.assign(nd, 0);
  S.extents.resize(nd);
  S.circular.assign(nd, false);
  for (auto a : circular_axes) {
    if (a < 0 || a >= static_cast<Index>(nd))
      throw ShapeError("circular axis out of range");
    S.circular[static_cast<std::size_t>(a)] = true;
  }
  for (std::size_t d = 0; d < nd; ++d) {
    if (S.circular[d])
      S.extents[d] = dims[d];
    else {
      if (K.extents()[d] > dims[d])
        throw ShapeError("kernel " + to_string(K.extents()) + " larger than array " + to_string(dims));
      S.extents[d] = dims[d] - K.extents()[d] + 1;
    }
  }
  return S;
}

void validate_geometry(Dims const &dims, KernelMask const &K, Region const &S) {
  auto const nd = dims.size();
  if (static_cast<std::size_t>(K.rank()) != nd || S.offsets.size() != nd || S.extents.size() != nd ||
      S.circular.size() != nd)
    throw ShapeError("rank mismatch between array " + to_string(dims) + ", kernel " + to_string(K.extents()) +
                     " and region");
  for (std::size_t d = 0; d < nd; ++d) {
    auto const Kd = K.extents()[d];
    if (S.circular[d]) {
      if (Kd > dims[d])
        throw ShapeError("kernel longer than circular axis " + std::to_string(d));
      if (S.offsets[d] != 0 || S.extents[d] != dims[d])
        throw ShapeError("circular axis " + std::to_string(d) + " must span the full extent");
    } else {
      if (Kd > dims[d])
        throw ShapeError("kernel " + to_string(K.extents()) + " larger than array " + to_string(dims));
      if (S.offsets[d] < 0 || S.extents[d] < 1 || S.offsets[d] + S.extents[d] > dims[d] - Kd + 1)
        throw ShapeError("region exceeds valid convolution range on axis " + std::to_string(d));
    }
  }
}

ConvGeometry::ConvGeometry(Dims const &dims, KernelMask const &K, Region const &S)
    : dims_{dims}, strides_{strides_of(dims)}, kernel_{&K}, region_{&S}, n_{K.n()}, s_{S.s()},
      array_size_{product(dims)} {
  validate_geometry(dims, K, S);
  auto const nd = dims.size();
  combo_strides_.assign(nd, 0);
  for (std::size_t d = nd; d-- > 0;)
    if (S.circular[d]) {
      combo_strides_[d] = combos_;
      combos_ *= dims[d];
    }
  koff_.resize(static_cast<std::size_t>(combos_ * n_));
  Dims cc(nd, 0);
  for (Index c = 0; c < combos_; ++c) {
    for (std::size_t d = 0; d < nd; ++d)
      cc[d] = combo_strides_[d] ? (c / combo_strides_[d]) % dims[d] : 0;
    for (Index col = 0; col < n_; ++col) {
      auto const pos = K.position(col);
      Index off = 0;
      for (std::size_t d = 0; d < nd; ++d)
        off += (S.circular[d] ? (cc[d] + pos[d]) % dims[d] : pos[d]) * strides_[d];
      koff_[static_cast<std::size_t>(c * n_ + col)] = off;
    }
  }
}

ConvGeometry::RowWalker::RowWalker(ConvGeometry const &g, Index start_row) : g_{&g}, coord_(g.dims_.size(), 0) {
  auto const &S = *g.region_;
  auto const nd = coord_.size();
  Index rem = start_row;
  for (std::size_t d = nd; d-- > 0;) {
    coord_[d] = rem % S.extents[d];
    rem /= S.extents[d];
  }
  for (std::size_t d = 0; d < nd; ++d) {
    if (S.circular[d])
      combo_ += coord_[d] * g.combo_strides_[d];
    else
      base_ += (S.offsets[d] + coord_[d]) * g.strides_[d];
  }
}

void ConvGeometry::RowWalker::advance() {
  auto const &S = *g_->region_;
  for (std::size_t d = coord_.size(); d-- > 0;) {
    Index const step = S.circular[d] ? g_->combo_strides_[d] : g_->strides_[d];
    Index &acc = S.circular[d] ? combo_ : base_;
    if (++coord_[d] < S.extents[d]) {
      acc += step;
      return;
    }
    acc -= (S.extents[d] - 1) * step;
    coord_[d] = 0;
  }
}

} // namespace hicu
