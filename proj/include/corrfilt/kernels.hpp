#ifndef CORRFILT_KERNELS_HPP
#define CORRFILT_KERNELS_HPP

#include <string>

#include "corrfilt/spectral.hpp"

namespace corrfilt {

/// Cubic convolution profile with a = -0.5 (Catmull-Rom), support |t| < 2.
double cubic_profile(double t);

/// Separable antialiased bicubic downscaling kernel for integer scale alpha:
/// 4*alpha taps per axis sampled at t = (i - 2*alpha)/alpha, unit-sum
/// normalized, center (2*alpha, 2*alpha). alpha = 1 degenerates to a delta.
Kernel bicubic_kernel(int alpha);

/// Isotropic Gaussian, sigma in HR pixels, odd tap count, unit sum.
Kernel gaussian_kernel(double sigma, int size);

/// width x width uniform taps of 1/width^2, center (width/2, width/2).
Kernel box_kernel(int width);

/// Centered delta of the given odd or even size (center size/2).
Kernel delta_kernel(int size = 1);

// KERN text format: line 1 "KERN 1"; line 2 "H W cy cx"; then H rows of W
// decimal floats. Trailing lines (sidecar metadata) are ignored on load.
Kernel load_kernel(const std::string& path);
void save_kernel(const Kernel& k, const std::string& path,
                 const std::string& sidecar = "");

} // namespace corrfilt

#endif
