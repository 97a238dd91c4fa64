#ifndef CORRFILT_METRICS_HPP
#define CORRFILT_METRICS_HPP

#include "corrfilt/image.hpp"

namespace corrfilt {

struct MetricReport {
    double psnr = 0.0;       // dB; +infinity for identical images
    double ssim = 0.0;       // in [-1, 1]
    int border_shaved = 0;   // pixels removed on each side before comparing
};

/// PSNR on BT.601 luma after shaving `border` pixels from every side.
/// Returns +infinity for identical inputs.
double psnr(const Image& a, const Image& b, int border = 0);

/// Mean local SSIM on luma, 11x11 Gaussian window sigma=1.5, K1=0.01,
/// K2=0.03, dynamic range 1. Windows are fully inside the shaved region.
double ssim(const Image& a, const Image& b, int border = 0);

MetricReport evaluate(const Image& a, const Image& b, int border = 0);

} // namespace corrfilt

#endif
