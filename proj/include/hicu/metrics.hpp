#pragma once

#include <limits>

#include "hicu/tensor.hpp"

namespace hicu {

inline constexpr double infinite_db = std::numeric_limits<double>::infinity();

/// Signal-to-error ratio 20 log10(||ref|| / ||est - ref||) in dB; +inf when est == ref.
double ser(CTensor const &ref, CTensor const &est);

/// 15 x 15 Laplacian-of-Gaussian (sigma 1.5) with zero sum, row-major.
RTensor log_kernel(Index size = 15, double sigma = 1.5);
/// Correlation of a 2D image with a 2D kernel, mirrored boundaries, same-size output.
RTensor filter_symmetric(RTensor const &img, RTensor const &kernel);

/// High-frequency error norm in dB, higher is better: 20 log10(||LoG(ref)|| / ||LoG(est - ref)||).
/// Inputs are 2D images.
double hfen(RTensor const &ref_img, RTensor const &est_img);
/// HFEN over a stack of 2D slices: axes 0 and 1 are the image, remaining axes index slices.
double hfen_slices(RTensor const &ref_img, RTensor const &est_img);

/// Mean SSIM of two 2D real images (11 x 11 Gaussian window, sigma 1.5, K1 0.01, K2 0.03,
/// valid-region averaging) with the given dynamic range.
double ssim(RTensor const &a, RTensor const &b, double dynamic_range);

/// SSIM of coil magnitude images averaged over coils. Coil axis is last; axes 0 and 1 form the
/// image and any axes in between are treated as slices. Dynamic range per coil is the maximum
/// magnitude of that reference coil image.
double ssim_coil_avg(CTensor const &ref, CTensor const &est);

} // namespace hicu
