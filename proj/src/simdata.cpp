#include "hicu/simdata.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace hicu {

std::vector<Ellipse> default_ellipses() {
  return {
      {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},     {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8},
      {0.22, 0.0, 0.11, 0.31, -18.0, -0.2}, {-0.22, 0.0, 0.16, 0.41, 18.0, -0.2},
      {0.0, 0.35, 0.21, 0.25, 0.0, 0.1},    {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
      {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1}, {0.06, -0.605, 0.023, 0.046, 0.0, 0.1},
  };
}

namespace {

void validate(PhantomSpec const &spec) {
  if (spec.nx < 1 || spec.ny < 1 || spec.nz < 0 || spec.nt < 0 || spec.ncoils < 1)
    throw ConfigError("phantom: extents and coil count must be positive");
  if (spec.sens_kspace_order < 0)
    throw ConfigError("phantom: sensitivity order must be >= 0");
  if (2 * spec.sens_kspace_order + 1 > spec.kernel_extent)
    throw ConfigError("phantom: sensitivity support 2*order+1 = " + std::to_string(2 * spec.sens_kspace_order + 1) +
                      " exceeds kernel extent " + std::to_string(spec.kernel_extent));
  Index const minext = std::min(spec.nx, spec.ny);
  if (2 * spec.sens_kspace_order + 1 > minext)
    throw ConfigError("phantom: sensitivity support larger than the grid");
}

} // namespace

Phantom gen_phantom(PhantomSpec const &spec) {
  validate(spec);
  Phantom ph;
  Dims spatial{spec.nx, spec.ny};
  if (spec.nz > 0)
    spatial.push_back(spec.nz);
  Index const nsd = static_cast<Index>(spatial.size());
  Index const nt = std::max<Index>(spec.nt, 1);
  Dims dims = spatial;
  if (spec.nt > 0)
    dims.push_back(spec.nt);
  dims.push_back(spec.ncoils);
  for (Index d = 0; d < nsd; ++d)
    ph.spatial_axes.push_back(d);

  // Sensitivity Fourier coefficients on the (2o+1)^d box, per coil.
  Index const o = spec.sens_kspace_order;
  Index const width = 2 * o + 1;
  Index ncoef = 1;
  for (Index d = 0; d < nsd; ++d)
    ncoef *= width;
  Rng rng(RngStream{spec.seed, 0, 0, 0, StreamPurpose::Phantom});
  std::vector<cplx> coef(static_cast<std::size_t>(ncoef * spec.ncoils));
  for (Index c = 0; c < spec.ncoils; ++c)
    for (Index k = 0; k < ncoef; ++k) {
      bool const center = k == ncoef / 2;
      coef[static_cast<std::size_t>(c * ncoef + k)] =
          center ? cplx{1.0, 0.0} + rng.complex_normal(0.25) : rng.complex_normal(0.1);
    }

  std::vector<double> phases(spec.ellipses.size());
  for (auto &p : phases)
    p = 2.0 * std::numbers::pi * rng.uniform();

  ph.coil_images = CTensor(dims);
  Index const npix = product(spatial);
  auto const sst = strides_of(spatial);
  Dims coord(static_cast<std::size_t>(nsd));
  for (Index pix = 0; pix < npix; ++pix) {
    for (Index d = 0; d < nsd; ++d)
      coord[static_cast<std::size_t>(d)] = (pix / sst[static_cast<std::size_t>(d)]) % spatial[static_cast<std::size_t>(d)];
    std::vector<double> rel(static_cast<std::size_t>(nsd));
    for (Index d = 0; d < nsd; ++d) {
      Index const N = spatial[static_cast<std::size_t>(d)];
      rel[static_cast<std::size_t>(d)] = static_cast<double>(coord[static_cast<std::size_t>(d)] - N / 2);
    }
    double const u = rel[0] / (spec.nx / 2.0), v = rel[1] / (spec.ny / 2.0);
    double const w = nsd > 2 ? rel[2] / (spec.nz / 2.0) : 0.0;

    // Sensitivity values at this pixel.
    std::vector<cplx> sens(static_cast<std::size_t>(spec.ncoils), cplx{1.0, 0.0});
    if (o > 0) {
      for (Index c = 0; c < spec.ncoils; ++c) {
        cplx acc{0.0, 0.0};
        for (Index k = 0; k < ncoef; ++k) {
          double arg = 0.0;
          Index rem = k;
          for (Index d = nsd; d-- > 0;) {
            Index const kd = rem % width - o;
            rem /= width;
            arg += static_cast<double>(kd) * rel[static_cast<std::size_t>(d)] /
                   static_cast<double>(spatial[static_cast<std::size_t>(d)]);
          }
          acc += coef[static_cast<std::size_t>(c * ncoef + k)] * std::polar(1.0, 2.0 * std::numbers::pi * arg);
        }
        sens[static_cast<std::size_t>(c)] = acc;
      }
    }

    for (Index t = 0; t < nt; ++t) {
      double val = 0.0;
      for (std::size_t e = 0; e < spec.ellipses.size(); ++e) {
        auto const &el = spec.ellipses[e];
        double const th = el.angle_deg * std::numbers::pi / 180.0;
        double const du = u - el.cx, dv = v - el.cy;
        double const ru = du * std::cos(th) + dv * std::sin(th);
        double const rv = -du * std::sin(th) + dv * std::cos(th);
        double r2 = (ru * ru) / (el.ax * el.ax) + (rv * rv) / (el.ay * el.ay);
        if (nsd > 2) {
          double const az = std::min(el.ax, el.ay);
          r2 += (w * w) / (az * az);
        }
        if (r2 <= 1.0) {
          double amp = el.intensity;
          if (spec.nt > 0)
            amp *= 1.0 + 0.25 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(nt) + phases[e]);
          val += amp;
        }
      }
      for (Index c = 0; c < spec.ncoils; ++c) {
        Index const lin = ((pix * nt) + t) * spec.ncoils + c;
        ph.coil_images[lin] = val * sens[static_cast<std::size_t>(c)];
      }
    }
  }
  ph.kspace = fft_kspace(ph.coil_images, ph.spatial_axes);
  return ph;
}

MaskAxes default_mask_axes(Dims const &dims, MaskPattern pattern) {
  Index const r = static_cast<Index>(dims.size());
  MaskAxes ax;
  switch (pattern) {
  case MaskPattern::VariableDensity1D:
    ax.phase = {r == 1 ? 0 : 1};
    break;
  case MaskPattern::Random2D:
    if (r < 2)
      throw ConfigError("random_2d mask needs at least two axes");
    ax.phase = r <= 3 ? std::vector<Index>{0, 1} : std::vector<Index>{1, 2};
    break;
  case MaskPattern::VariableDensityTime:
    if (r < 3)
      throw ConfigError("vd_t mask needs [readout, phase, time, ...] axes");
    ax.phase = {1};
    ax.time = 2;
    break;
  }
  return ax;
}

namespace {

// Weighted sampling without replacement (exponential keys); returns chosen candidate indices.
std::vector<Index> weighted_pick(std::vector<Index> const &candidates, std::vector<double> const &weights, Index count,
                                 Rng &rng) {
  std::vector<std::pair<double, Index>> keys;
  keys.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double u = 0.0;
    while (u <= 0.0)
      u = rng.uniform();
    keys.emplace_back(std::log(u) / weights[i], candidates[i]);
  }
  std::partial_sort(keys.begin(), keys.begin() + count, keys.end(),
                    [](auto const &a, auto const &b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  std::vector<Index> out;
  for (Index i = 0; i < count; ++i)
    out.push_back(keys[static_cast<std::size_t>(i)].second);
  return out;
}

void check_ratio(double achieved, double target) {
  if (std::abs(achieved - target) > 0.05 * target)
    throw ConfigError("mask: achieved acceleration " + std::to_string(achieved) + " not within 5% of " +
                      std::to_string(target));
}

// Line selection along one phase axis of extent np.
std::vector<std::uint8_t> vd_lines(Index np, MaskSpec const &spec, std::uint64_t step) {
  Index const lines = std::max<Index>(1, static_cast<Index>(std::llround(static_cast<double>(np) / spec.R)));
  Index const acs = spec.acs.empty() ? 0 : spec.acs[0];
  if (acs < 0 || acs > np)
    throw ConfigError("mask: ACS does not fit the phase-encode extent");
  if (acs > lines)
    throw ConfigError("mask: ACS of " + std::to_string(acs) + " lines exceeds the budget of " + std::to_string(lines));
  std::vector<std::uint8_t> sel(static_cast<std::size_t>(np), 0);
  Index const a0 = (np - acs) / 2;
  for (Index k = a0; k < a0 + acs; ++k)
    sel[static_cast<std::size_t>(k)] = 1;
  std::vector<Index> cand;
  std::vector<double> wts;
  double const sigma = std::max(1e-9, spec.sigma_fraction * static_cast<double>(np));
  for (Index k = 0; k < np; ++k)
    if (!sel[static_cast<std::size_t>(k)]) {
      cand.push_back(k);
      wts.push_back(std::pow(1.0 + std::abs(static_cast<double>(k - np / 2)) / sigma, -spec.decay));
    }
  Rng rng(RngStream{spec.seed, 0, 0, step, StreamPurpose::Mask});
  for (auto k : weighted_pick(cand, wts, lines - acs, rng))
    sel[static_cast<std::size_t>(k)] = 1;
  check_ratio(static_cast<double>(np) / static_cast<double>(lines), spec.R);
  return sel;
}

} // namespace

BinaryMask gen_mask(Dims const &dims, MaskSpec const &spec, std::optional<MaskAxes> axes_in) {
  if (!(spec.R >= 1.0))
    throw ConfigError("mask: R must be >= 1");
  BinaryMask M(dims, 0);
  if (spec.R == 1.0) {
    for (auto &b : M.span())
      b = 1;
    return M;
  }
  auto const axes = axes_in ? *axes_in : default_mask_axes(dims, spec.pattern);
  auto const rank = static_cast<Index>(dims.size());
  for (auto a : axes.phase)
    if (a < 0 || a >= rank)
      throw ConfigError("mask: phase axis out of range");
  auto const st = strides_of(dims);
  auto coord = [&](Index lin, Index axis) { return (lin / st[static_cast<std::size_t>(axis)]) % dims[static_cast<std::size_t>(axis)]; };

  switch (spec.pattern) {
  case MaskPattern::VariableDensity1D: {
    Index const pa = axes.phase.at(0);
    auto const sel = vd_lines(dims[static_cast<std::size_t>(pa)], spec, 0);
    for (Index j = 0; j < M.size(); ++j)
      M[j] = sel[static_cast<std::size_t>(coord(j, pa))];
    break;
  }
  case MaskPattern::VariableDensityTime: {
    Index const pa = axes.phase.at(0), ta = axes.time;
    if (ta < 0 || ta >= rank)
      throw ConfigError("mask: time axis out of range");
    Index const nt = dims[static_cast<std::size_t>(ta)];
    std::vector<std::vector<std::uint8_t>> frames;
    for (Index t = 0; t < nt; ++t)
      frames.push_back(vd_lines(dims[static_cast<std::size_t>(pa)], spec, static_cast<std::uint64_t>(t)));
    for (Index j = 0; j < M.size(); ++j)
      M[j] = frames[static_cast<std::size_t>(coord(j, ta))][static_cast<std::size_t>(coord(j, pa))];
    break;
  }
  case MaskPattern::Random2D: {
    if (axes.phase.size() != 2)
      throw ConfigError("random_2d mask needs two phase axes");
    Index const a1 = axes.phase[0], a2 = axes.phase[1];
    Index const n1 = dims[static_cast<std::size_t>(a1)], n2 = dims[static_cast<std::size_t>(a2)];
    Index const total = n1 * n2;
    Index const target = static_cast<Index>(std::llround(static_cast<double>(total) / spec.R));
    Index const c1 = spec.acs.size() > 0 ? spec.acs[0] : 0, c2 = spec.acs.size() > 1 ? spec.acs[1] : c1;
    if (c1 < 0 || c2 < 0 || c1 > n1 || c2 > n2)
      throw ConfigError("mask: ACS block does not fit");
    if (c1 * c2 > target)
      throw ConfigError("mask: ACS block alone exceeds the sampling budget");
    std::vector<std::uint8_t> plane(static_cast<std::size_t>(total), 0);
    Index const o1 = (n1 - c1) / 2, o2 = (n2 - c2) / 2;
    for (Index i = o1; i < o1 + c1; ++i)
      for (Index k = o2; k < o2 + c2; ++k)
        plane[static_cast<std::size_t>(i * n2 + k)] = 1;
    std::vector<Index> cand;
    for (Index p = 0; p < total; ++p)
      if (!plane[static_cast<std::size_t>(p)])
        cand.push_back(p);
    // i.i.d. Bernoulli outside the ACS block; draws whose count misses the 5% band are redrawn
    // from the next stream.
    double const prob = cand.empty() ? 0.0 : static_cast<double>(target - c1 * c2) / static_cast<double>(cand.size());
    bool accepted = false;
    for (std::uint64_t attempt = 0; attempt < 1000 && !accepted; ++attempt) {
      Rng rng(RngStream{spec.seed, 0, attempt, 0, StreamPurpose::Mask});
      Index ones = c1 * c2;
      std::vector<std::uint8_t> draw(cand.size(), 0);
      for (std::size_t q = 0; q < cand.size(); ++q) {
        draw[q] = rng.uniform() < prob ? 1 : 0;
        ones += draw[q];
      }
      if (ones == 0)
        continue;
      double const achieved = static_cast<double>(total) / static_cast<double>(ones);
      if (std::abs(achieved - spec.R) > 0.05 * spec.R)
        continue;
      for (std::size_t q = 0; q < cand.size(); ++q)
        plane[static_cast<std::size_t>(cand[q])] = draw[q];
      accepted = true;
    }
    if (!accepted)
      throw ConfigError("mask: random_2d could not reach R within 5% of " + std::to_string(spec.R));
    for (Index j = 0; j < M.size(); ++j)
      M[j] = plane[static_cast<std::size_t>(coord(j, a1) * n2 + coord(j, a2))];
    break;
  }
  }
  return M;
}

double acceleration(BinaryMask const &M) {
  Index const ones = count_ones(M);
  if (ones == 0)
    throw DegenerateInputError("mask samples nothing");
  return static_cast<double>(M.size()) / static_cast<double>(ones);
}

CTensor add_noise(CTensor const &X, double snr_db, RngStream const &rng) {
  if (std::isinf(snr_db) && snr_db > 0)
    return X;
  double const xn = norm(X.span());
  if (xn == 0.0)
    throw DegenerateInputError("add_noise: zero signal");
  auto noise = complex_gaussian_tensor(X.dims(), 1.0, rng);
  double const target = xn * std::pow(10.0, -snr_db / 20.0);
  double const scale = target / norm(noise.span());
  CTensor out(X.dims());
  for (Index j = 0; j < X.size(); ++j)
    out[j] = X[j] + scale * noise[j];
  return out;
}

} // namespace hicu
