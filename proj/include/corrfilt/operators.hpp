#ifndef CORRFILT_OPERATORS_HPP
#define CORRFILT_OPERATORS_HPP

#include "corrfilt/image.hpp"
#include "corrfilt/spectral.hpp"

namespace corrfilt {

/// Binds a blur kernel to an integer sub-sampling stride and phase.
struct SamplingConfig {
    Kernel kernel;
    int scale = 1;                 // alpha >= 1
    int phase_row = 0, phase_col = 0;  // in [0, scale)
};

// Grid-level primitives (single channel).
Grid downsample_grid(const Grid& x, const SamplingConfig& cfg, bool pad = true);
Grid upsample_grid(const Grid& y, const SamplingConfig& cfg);

/// y = (x * k) down_alpha, cyclic boundaries. If the HR dims are not
/// divisible by alpha and pad is enabled, the input is reflect-padded up to
/// the next multiple first (so LR dims = ceil(HR/alpha)).
Image downsample(const Image& x, const SamplingConfig& cfg, bool pad = true);

/// Insert alpha-1 zeros between samples (samples land on the phase offsets)
/// then cyclically convolve with the flipped kernel. Adjoint of downsample.
Image upsample(const Image& y, const SamplingConfig& cfg);

/// The built-in linear super-resolver R (R*R)^-1: divides DFT(y) by the
/// spectrum of the alpha-subsampled bicubic autocorrelation (epsilon-
/// regularized) and upsamples with the bicubic kernel.
Image pseudo_inverse_reconstruct(const Image& y, int alpha, double epsilon = 0.0);
Grid pseudo_inverse_reconstruct_grid(const Grid& y, int alpha, double epsilon = 0.0);

} // namespace corrfilt

#endif
