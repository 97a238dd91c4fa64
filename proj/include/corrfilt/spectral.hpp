#ifndef CORRFILT_SPECTRAL_HPP
#define CORRFILT_SPECTRAL_HPP

#include "corrfilt/grid.hpp"

namespace corrfilt {

/// Complex 2-D spectrum stored as separate real/imaginary grids so the
/// estimation gradients can chain through it with purely real arithmetic.
struct Spectrum {
    Grid re, im;

    Spectrum() = default;
    Spectrum(int h, int w) : re(h, w), im(h, w) {}
    int height() const { return re.height(); }
    int width() const { return re.width(); }
};

/// Small 2-D tap grid with a designated origin tap.
struct Kernel {
    Grid taps;
    int center_row = 0;
    int center_col = 0;

    int height() const { return taps.height(); }
    int width() const { return taps.width(); }
};

/// Reverse taps in both axes; the center tracks the same physical tap.
Kernel flip(const Kernel& k);

/// Unnormalized forward 2-D DFT of a real grid.
Spectrum dft2(const Grid& g);

/// Inverse 2-D DFT with 1/(H*W) normalization. The imaginary residue is
/// discarded after checking max|im| < 1e-8 * max|re|; a larger residue means
/// the input was not Hermitian and raises NumericError.
Grid idft2(const Spectrum& s);

/// Embed kernel taps into an HxW grid with the center tap at (0,0),
/// wrapping negative offsets circularly. Fails if the kernel exceeds the grid.
Grid center_shift(const Kernel& k, int height, int width);

/// Like center_shift but folds (accumulates) taps that wrap onto the same
/// cell, so kernels larger than the grid alias consistently with cyclic
/// convolution semantics.
Grid center_shift_folded(const Kernel& k, int height, int width);

/// Circular convolution; the kernel center aligns with the output pixel.
Grid cyclic_convolve(const Grid& g, const Kernel& k);

/// Full linear convolution; output dims (Ha+Hb-1, Wa+Wb-1), output center =
/// sum of input centers.
Kernel linear_convolve(const Kernel& a, const Kernel& b);

/// Keep every alpha-th tap aligned on the center: out[j] = q[center + alpha*j].
/// The output center lands on j = 0.
Kernel subsample_kernel(const Kernel& q, int alpha);

// Pointwise spectral helpers.
Spectrum spec_mul(const Spectrum& a, const Spectrum& b);
Spectrum spec_conj(const Spectrum& s);

/// idft2(dft2(g) * s) per channel of a single grid.
Grid apply_spectrum(const Grid& g, const Spectrum& s);

} // namespace corrfilt

#endif
