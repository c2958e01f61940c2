#pragma once

#include <optional>

#include "hicu/rng.hpp"

namespace hicu {

struct Ellipse {
  double cx = 0.0, cy = 0.0; // center, fraction of the half field of view
  double ax = 0.5, ay = 0.5; // semi-axes, fraction of the half field of view
  double angle_deg = 0.0;
  double intensity = 1.0;
};

/// Small Shepp-Logan-like layout.
std::vector<Ellipse> default_ellipses();

struct PhantomSpec {
  Index nx = 64, ny = 64;
  Index nz = 0; // 0: 2D
  Index nt = 0; // 0: static
  Index ncoils = 8;
  /// Half-width of each sensitivity map's k-space support; 0 means unit sensitivities.
  Index sens_kspace_order = 1;
  std::vector<Ellipse> ellipses = default_ellipses();
  std::uint64_t seed = 1;
  /// Intended reconstruction kernel extent along the spatial axes (for validation only).
  Index kernel_extent = 5;
};

struct Phantom {
  /// [nx, ny, (nz), (nt), coil]
  CTensor kspace;
  CTensor coil_images;
  std::vector<Index> spatial_axes;
};

/// Multi-coil phantom: coil image c is the ellipse image times a sensitivity map whose
/// centered DFT is supported on the central (2 order + 1)^d box, so pairwise cross-coil
/// annihilating kernels of extent >= 2 order + 1 exist exactly.
Phantom gen_phantom(PhantomSpec const &spec);

enum class MaskPattern { VariableDensity1D, Random2D, VariableDensityTime };

struct MaskSpec {
  MaskPattern pattern = MaskPattern::VariableDensity1D;
  double R = 2.0;
  /// ACS extents along the phase-encode axes (vd_1d/vd_t: one entry; random_2d: two).
  Dims acs;
  std::uint64_t seed = 1;
  double decay = 2.0;
  /// Density width as a fraction of the phase-encode extent.
  double sigma_fraction = 1.0 / 8.0;
};

/// Axis roles for a mask over `dims`. Defaults: vd_1d phase axis 1 (axis 0 for 1D/2D
/// planes of rank 1), random_2d phase axes {1, 2} or {0, 1} for a bare 2D plane,
/// vd_t phase axis 1 and time axis 2. All other axes are replicated.
struct MaskAxes {
  std::vector<Index> phase;
  Index time = -1;
};
MaskAxes default_mask_axes(Dims const &dims, MaskPattern pattern);

BinaryMask gen_mask(Dims const &dims, MaskSpec const &spec, std::optional<MaskAxes> axes = std::nullopt);

/// Achieved acceleration: total / sampled.
double acceleration(BinaryMask const &M);

/// Adds complex Gaussian noise scaled to exactly `snr_db` (20 log10 ||X|| / ||noise||).
/// snr_db = +inf returns X unchanged.
CTensor add_noise(CTensor const &X, double snr_db, RngStream const &rng);

} // namespace hicu
