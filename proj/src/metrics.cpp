#include "hicu/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hicu {

double ser(CTensor const &ref, CTensor const &est) {
  require_same_dims(ref.dims(), est.dims(), "ser");
  double const ref_norm = norm(ref.span());
  if (ref_norm == 0.0)
    throw DegenerateInputError("ser: zero reference");
  double err = 0.0;
  for (Index j = 0; j < ref.size(); ++j)
    err += std::norm(est[j] - ref[j]);
  if (err == 0.0)
    return infinite_db;
  return 20.0 * std::log10(ref_norm / std::sqrt(err));
}

RTensor log_kernel(Index size, double sigma) {
  RTensor h({size, size});
  Index const half = (size - 1) / 2;
  double const s2 = sigma * sigma;
  double hmax = 0.0;
  for (Index y = 0; y < size; ++y)
    for (Index x = 0; x < size; ++x) {
      double const r2 = static_cast<double>((x - half) * (x - half) + (y - half) * (y - half));
      h.at({y, x}) = std::exp(-r2 / (2.0 * s2));
      hmax = std::max(hmax, h.at({y, x}));
    }
  double sum = 0.0;
  for (auto &v : h.span()) {
    if (v < std::numeric_limits<double>::epsilon() * hmax)
      v = 0.0;
    sum += v;
  }
  double mean = 0.0;
  for (Index y = 0; y < size; ++y)
    for (Index x = 0; x < size; ++x) {
      double const r2 = static_cast<double>((x - half) * (x - half) + (y - half) * (y - half));
      auto &v = h.at({y, x});
      v = v / sum * (r2 - 2.0 * s2) / (s2 * s2);
      mean += v;
    }
  mean /= static_cast<double>(h.size());
  for (auto &v : h.span())
    v -= mean;
  return h;
}

namespace {

Index mirror(Index i, Index n) {
  Index const period = 2 * n;
  i %= period;
  if (i < 0)
    i += period;
  return i < n ? i : period - 1 - i;
}

void require_2d(RTensor const &img, char const *what) {
  if (img.rank() != 2)
    throw ShapeError(std::string(what) + ": expected a 2D image, got dims " + to_string(img.dims()));
}

RTensor slice_of(RTensor const &stack, Index k) {
  Index const ny = stack.dim(0), nx = stack.dim(1);
  Index const nslices = stack.size() / (ny * nx);
  RTensor out({ny, nx});
  for (Index y = 0; y < ny; ++y)
    for (Index x = 0; x < nx; ++x)
      out.at({y, x}) = stack[(y * nx + x) * nslices + k];
  return out;
}

} // namespace

RTensor filter_symmetric(RTensor const &img, RTensor const &kernel) {
  require_2d(img, "filter_symmetric");
  require_2d(kernel, "filter_symmetric kernel");
  Index const ny = img.dim(0), nx = img.dim(1);
  Index const ky = kernel.dim(0), kx = kernel.dim(1);
  Index const cy = (ky - 1) / 2, cx = (kx - 1) / 2;
  RTensor out({ny, nx});
  for (Index y = 0; y < ny; ++y)
    for (Index x = 0; x < nx; ++x) {
      double acc = 0.0;
      for (Index a = 0; a < ky; ++a)
        for (Index b = 0; b < kx; ++b)
          acc += kernel.at({a, b}) * img.at({mirror(y + a - cy, ny), mirror(x + b - cx, nx)});
      out.at({y, x}) = acc;
    }
  return out;
}

double hfen(RTensor const &ref_img, RTensor const &est_img) {
  require_2d(ref_img, "hfen");
  require_same_dims(ref_img.dims(), est_img.dims(), "hfen");
  auto const h = log_kernel();
  RTensor diff(ref_img.dims());
  for (Index j = 0; j < diff.size(); ++j)
    diff[j] = est_img[j] - ref_img[j];
  double const num = norm_sq(filter_symmetric(ref_img, h).span());
  double const den = norm_sq(filter_symmetric(diff, h).span());
  if (num == 0.0)
    throw DegenerateInputError("hfen: reference has no high-frequency content");
  // Constants leave round-off behind after a zero-sum filter.
  if (den <= 1e-28 * num)
    return infinite_db;
  return 10.0 * std::log10(num / den);
}

double hfen_slices(RTensor const &ref_img, RTensor const &est_img) {
  require_same_dims(ref_img.dims(), est_img.dims(), "hfen_slices");
  if (ref_img.rank() < 2)
    throw ShapeError("hfen_slices: need at least two image axes");
  if (ref_img.rank() == 2)
    return hfen(ref_img, est_img);
  auto const h = log_kernel();
  Index const nslices = ref_img.size() / (ref_img.dim(0) * ref_img.dim(1));
  double num = 0.0, den = 0.0;
  for (Index k = 0; k < nslices; ++k) {
    auto const r = slice_of(ref_img, k);
    auto e = slice_of(est_img, k);
    for (Index j = 0; j < e.size(); ++j)
      e[j] -= r[j];
    num += norm_sq(filter_symmetric(r, h).span());
    den += norm_sq(filter_symmetric(e, h).span());
  }
  if (num == 0.0)
    throw DegenerateInputError("hfen: reference has no high-frequency content");
  if (den <= 1e-28 * num)
    return infinite_db;
  return 10.0 * std::log10(num / den);
}

namespace {

constexpr Index ssim_window = 11;

std::vector<double> gaussian_window() {
  std::vector<double> w(ssim_window * ssim_window);
  Index const half = (ssim_window - 1) / 2;
  double sum = 0.0;
  for (Index y = 0; y < ssim_window; ++y)
    for (Index x = 0; x < ssim_window; ++x) {
      double const r2 = static_cast<double>((x - half) * (x - half) + (y - half) * (y - half));
      w[static_cast<std::size_t>(y * ssim_window + x)] = std::exp(-r2 / (2.0 * 1.5 * 1.5));
      sum += w[static_cast<std::size_t>(y * ssim_window + x)];
    }
  for (auto &v : w)
    v /= sum;
  return w;
}

} // namespace

double ssim(RTensor const &a, RTensor const &b, double dynamic_range) {
  require_2d(a, "ssim");
  require_same_dims(a.dims(), b.dims(), "ssim");
  Index const ny = a.dim(0), nx = a.dim(1);
  if (ny < ssim_window || nx < ssim_window)
    throw ShapeError("ssim: images must be at least 11x11");
  static auto const w = gaussian_window();
  double const c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
  double const c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
  double total = 0.0;
  Index count = 0;
  for (Index y = 0; y + ssim_window <= ny; ++y)
    for (Index x = 0; x + ssim_window <= nx; ++x) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (Index u = 0; u < ssim_window; ++u)
        for (Index v = 0; v < ssim_window; ++v) {
          double const wt = w[static_cast<std::size_t>(u * ssim_window + v)];
          double const pa = a.at({y + u, x + v}), pb = b.at({y + u, x + v});
          ma += wt * pa;
          mb += wt * pb;
          saa += wt * pa * pa;
          sbb += wt * pb * pb;
          sab += wt * pa * pb;
        }
      double const va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  return total / static_cast<double>(count);
}

double ssim_coil_avg(CTensor const &ref, CTensor const &est) {
  require_same_dims(ref.dims(), est.dims(), "ssim_coil_avg");
  if (ref.rank() < 3)
    throw ShapeError("ssim_coil_avg: expected [y, x, (slices...), coil], got " + to_string(ref.dims()));
  Index const ny = ref.dim(0), nx = ref.dim(1), nc = ref.dim(ref.rank() - 1);
  Index const nslices = ref.size() / (ny * nx * nc);
  double total = 0.0;
  for (Index c = 0; c < nc; ++c) {
    double range = 0.0;
    for (Index j = c; j < ref.size(); j += nc)
      range = std::max(range, std::abs(ref[j]));
    if (range == 0.0)
      range = 1.0;
    double coil_total = 0.0;
    for (Index k = 0; k < nslices; ++k) {
      RTensor ra({ny, nx}), ea({ny, nx});
      for (Index p = 0; p < ny * nx; ++p) {
        Index const j = (p * nslices + k) * nc + c;
        ra[p] = std::abs(ref[j]);
        ea[p] = std::abs(est[j]);
      }
      coil_total += ssim(ra, ea, range);
    }
    total += coil_total / static_cast<double>(nslices);
  }
  return total / static_cast<double>(nc);
}

} // namespace hicu
