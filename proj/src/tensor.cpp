#include "hicu/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include <fftw3.h>

namespace hicu {

Index product(std::span<Index const> dims) {
  Index p = 1;
  for (auto d : dims)
    p *= d;
  return p;
}

std::string to_string(std::span<Index const> dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i)
      s += ",";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

Dims strides_of(std::span<Index const> dims) {
  Dims st(dims.size(), 1);
  for (std::size_t d = dims.size(); d-- > 1;)
    st[d - 1] = st[d] * dims[d];
  return st;
}

void require_same_dims(std::span<Index const> a, std::span<Index const> b, char const *what) {
  if (!std::equal(a.begin(), a.end(), b.begin(), b.end()))
    throw ShapeError(std::string(what) + ": dims " + to_string(a) + " vs " + to_string(b));
}

double norm_sq(std::span<cplx const> x) {
  double s = 0.0;
  for (auto const &v : x)
    s += std::norm(v);
  return s;
}

double norm(std::span<cplx const> x) { return std::sqrt(norm_sq(x)); }

double norm_sq(std::span<double const> x) {
  double s = 0.0;
  for (auto v : x)
    s += v * v;
  return s;
}

cplx inner(std::span<cplx const> a, std::span<cplx const> b) {
  if (a.size() != b.size())
    throw ShapeError("inner product of vectors with different lengths");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i)
    s += std::conj(a[i]) * b[i];
  return s;
}

BinaryMask validate_mask(BinaryMask M) {
  for (auto b : M.span())
    if (b > 1)
      throw ShapeError("mask entries must be 0 or 1");
  return M;
}

Index count_ones(BinaryMask const &M) {
  return std::count_if(M.span().begin(), M.span().end(), [](auto b) { return b != 0; });
}

CTensor mask_apply(CTensor const &X, BinaryMask const &M) {
  require_same_dims(X.dims(), M.dims(), "mask_apply");
  CTensor out(X.dims());
  for (Index j = 0; j < X.size(); ++j)
    if (M[j])
      out[j] = X[j];
  return out;
}

Dims center_offsets(std::span<Index const> dims, std::span<Index const> sub_dims) {
  if (dims.size() != sub_dims.size())
    throw ShapeError("crop: rank mismatch " + to_string(dims) + " vs " + to_string(sub_dims));
  Dims off(dims.size());
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (sub_dims[d] < 1 || sub_dims[d] > dims[d])
      throw ShapeError("crop: sub dims " + to_string(sub_dims) + " exceed " + to_string(dims));
    off[d] = (dims[d] - sub_dims[d]) / 2;
  }
  return off;
}

namespace {

// Copies the box [off, off+small) between a large and a small tensor in either direction.
template <typename T, bool ToSmall>
void copy_box(T *large, Dims const &ldims, T *small, Dims const &sdims, Dims const &off) {
  auto const lst = strides_of(ldims);
  auto const nd = sdims.size();
  Dims idx(nd, 0);
  Index const total = product(sdims);
  for (Index k = 0; k < total; ++k) {
    Index loff = 0;
    for (std::size_t d = 0; d < nd; ++d)
      loff += (idx[d] + off[d]) * lst[d];
    if constexpr (ToSmall)
      small[k] = large[loff];
    else
      large[loff] = small[k];
    for (std::size_t d = nd; d-- > 0;) {
      if (++idx[d] < sdims[d])
        break;
      idx[d] = 0;
    }
  }
}

} // namespace

template <typename T> Tensor<T> crop_center(Tensor<T> const &X, Dims const &sub_dims) {
  auto const off = center_offsets(X.dims(), sub_dims);
  Tensor<T> out(sub_dims);
  copy_box<T, true>(const_cast<T *>(X.data()), X.dims(), out.data(), sub_dims, off);
  return out;
}

template <typename T> Tensor<T> embed_center(Tensor<T> const &X, Dims const &dims) {
  auto const off = center_offsets(dims, X.dims());
  Tensor<T> out(dims);
  copy_box<T, false>(out.data(), dims, const_cast<T *>(X.data()), X.dims(), off);
  return out;
}

template Tensor<cplx> crop_center(Tensor<cplx> const &, Dims const &);
template Tensor<double> crop_center(Tensor<double> const &, Dims const &);
template Tensor<std::uint8_t> crop_center(Tensor<std::uint8_t> const &, Dims const &);
template Tensor<cplx> embed_center(Tensor<cplx> const &, Dims const &);
template Tensor<double> embed_center(Tensor<double> const &, Dims const &);
template Tensor<std::uint8_t> embed_center(Tensor<std::uint8_t> const &, Dims const &);

namespace {

std::mutex fftw_planner_mutex;

// Cyclic shift along one axis: out[(k + shift) mod N] = in[k].
void roll_axis(CTensor &X, Index axis, Index shift) {
  Index const n = X.dim(axis);
  shift = ((shift % n) + n) % n;
  if (shift == 0)
    return;
  auto const st = strides_of(X.dims());
  Index const inner = st[static_cast<std::size_t>(axis)];
  Index const outer = X.size() / (n * inner);
  std::vector<cplx> line(static_cast<std::size_t>(n));
  for (Index o = 0; o < outer; ++o)
    for (Index i = 0; i < inner; ++i) {
      cplx *base = X.data() + o * n * inner + i;
      for (Index k = 0; k < n; ++k)
        line[static_cast<std::size_t>((k + shift) % n)] = base[k * inner];
      for (Index k = 0; k < n; ++k)
        base[k * inner] = line[static_cast<std::size_t>(k)];
    }
}

void check_axes(CTensor const &X, std::vector<Index> const &axes) {
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a] < 0 || axes[a] >= X.rank())
      throw ShapeError("invalid transform axis " + std::to_string(axes[a]) + " for dims " + to_string(X.dims()));
    for (std::size_t b = 0; b < a; ++b)
      if (axes[a] == axes[b])
        throw ShapeError("transform axes must be distinct");
  }
}

CTensor centered_dft(CTensor const &in, std::vector<Index> const &axes, int sign) {
  check_axes(in, axes);
  CTensor X = in;
  auto const st = strides_of(X.dims());
  double scale = 1.0;
  for (auto axis : axes) {
    Index const n = X.dim(axis);
    Index const inner = st[static_cast<std::size_t>(axis)];
    Index const outer = X.size() / (n * inner);
    roll_axis(X, axis, -(n / 2));
    fftw_iodim dim{static_cast<int>(n), static_cast<int>(inner), static_cast<int>(inner)};
    fftw_iodim loops[2] = {{static_cast<int>(outer), static_cast<int>(n * inner), static_cast<int>(n * inner)},
                           {static_cast<int>(inner), 1, 1}};
    auto *ptr = reinterpret_cast<fftw_complex *>(X.data());
    fftw_plan plan;
    {
      std::lock_guard lock(fftw_planner_mutex);
      plan = fftw_plan_guru_dft(1, &dim, 2, loops, ptr, ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard lock(fftw_planner_mutex);
      fftw_destroy_plan(plan);
    }
    roll_axis(X, axis, n / 2);
    scale *= static_cast<double>(n);
  }
  double const s = 1.0 / std::sqrt(scale);
  for (auto &v : X.span())
    v *= s;
  return X;
}

} // namespace

CTensor ifft_image(CTensor const &K, std::vector<Index> const &spatial_axes) {
  return centered_dft(K, spatial_axes, FFTW_BACKWARD);
}

CTensor fft_kspace(CTensor const &img, std::vector<Index> const &spatial_axes) {
  return centered_dft(img, spatial_axes, FFTW_FORWARD);
}

RTensor ssos_combine(CTensor const &images, Index coil_axis) {
  if (coil_axis < 0)
    coil_axis += images.rank();
  if (coil_axis < 0 || coil_axis >= images.rank())
    throw ShapeError("ssos_combine: invalid coil axis");
  Dims out_dims;
  for (Index d = 0; d < images.rank(); ++d)
    if (d != coil_axis)
      out_dims.push_back(images.dim(d));
  if (out_dims.empty())
    out_dims.push_back(1);
  auto const st = strides_of(images.dims());
  Index const nc = images.dim(coil_axis);
  Index const inner = st[static_cast<std::size_t>(coil_axis)];
  Index const outer = images.size() / (nc * inner);
  RTensor out(out_dims);
  for (Index o = 0; o < outer; ++o)
    for (Index i = 0; i < inner; ++i) {
      double s = 0.0;
      for (Index c = 0; c < nc; ++c)
        s += std::norm(images[o * nc * inner + c * inner + i]);
      out[o * inner + i] = std::sqrt(s);
    }
  return out;
}

CTensor operator+(CTensor const &a, CTensor const &b) {
  require_same_dims(a.dims(), b.dims(), "tensor add");
  CTensor out(a.dims());
  for (Index j = 0; j < a.size(); ++j)
    out[j] = a[j] + b[j];
  return out;
}

CTensor operator-(CTensor const &a, CTensor const &b) {
  require_same_dims(a.dims(), b.dims(), "tensor subtract");
  CTensor out(a.dims());
  for (Index j = 0; j < a.size(); ++j)
    out[j] = a[j] - b[j];
  return out;
}

CTensor operator*(cplx a, CTensor const &b) {
  CTensor out(b.dims());
  for (Index j = 0; j < b.size(); ++j)
    out[j] = a * b[j];
  return out;
}

} // namespace hicu
