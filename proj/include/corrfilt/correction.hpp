#ifndef CORRFILT_CORRECTION_HPP
#define CORRFILT_CORRECTION_HPP

#include "corrfilt/image.hpp"
#include "corrfilt/spectral.hpp"

namespace corrfilt {

/// Frequency-domain correction filter bound to a specific LR grid size.
struct CorrectionFilter {
    enum class Variant { exact_h0, regularized_h };

    Spectrum spectrum;        // Hermitian; its spatial filter is real
    int grid_h = 0, grid_w = 0;
    double epsilon = 0.0;
    Variant variant = Variant::regularized_h;
};

/// DFT of the LR-grid embedding of (k * flip(k_bicub)) subsampled by alpha.
Spectrum denominator_spectrum(const Kernel& k, int alpha, int grid_h, int grid_w);

/// DFT of the LR-grid embedding of (k_bicub * flip(k_bicub)) subsampled by
/// alpha (the numerator shared with the pseudo-inverse reconstructor).
Spectrum numerator_spectrum(int alpha, int grid_h, int grid_w);

/// Exact inverse filter h0 = IDFT{ 1 / F_denom }. Requires the minimum
/// denominator modulus to exceed 1e-12, otherwise raises NumericError naming
/// the offending frequency.
CorrectionFilter correction_filter_exact(const Kernel& k, int alpha,
                                         int grid_h, int grid_w);

/// Regularized resolver-compensated filter
/// h = IDFT{ F_numer * conj(F_denom) / (|F_denom|^2 + eps) }.
CorrectionFilter correction_filter(const Kernel& k, int alpha,
                                   int grid_h, int grid_w, double epsilon);

/// Per channel: idft2(dft2(channel) * h.spectrum).
Image apply_correction(const Image& y, const CorrectionFilter& h);
Grid apply_correction_grid(const Grid& y, const CorrectionFilter& h);

/// Numerical check of the empty-null-space condition behind the exact filter.
struct DiagnosticReport {
    double min_modulus = 0.0;
    int argmin_row = 0, argmin_col = 0;
    double threshold = 1e-6;
    bool pass = false;
};

DiagnosticReport invertibility_diagnostic(const Kernel& k, int alpha,
                                          int grid_h, int grid_w,
                                          double threshold = 1e-6);

/// Spatial filter taps of a correction filter, center-cropped to at most
/// crop x crop around the origin. Used for the estimated-filter KERN output.
Kernel spatial_filter(const CorrectionFilter& h, int crop = 65);

} // namespace corrfilt

#endif
