#include <cmath>
#include <sstream>

#include "corrfilt/correction.hpp"
#include "corrfilt/kernels.hpp"

namespace corrfilt {

Spectrum denominator_spectrum(const Kernel& k, int alpha, int grid_h, int grid_w) {
    const Kernel kb = bicubic_kernel(alpha);
    const Kernel cross = linear_convolve(k, flip(kb));
    const Kernel sub = subsample_kernel(cross, alpha);
    return dft2(center_shift_folded(sub, grid_h, grid_w));
}

Spectrum numerator_spectrum(int alpha, int grid_h, int grid_w) {
    const Kernel kb = bicubic_kernel(alpha);
    return denominator_spectrum(kb, alpha, grid_h, grid_w);
}

CorrectionFilter correction_filter_exact(const Kernel& k, int alpha,
                                         int grid_h, int grid_w) {
    const Spectrum d = denominator_spectrum(k, alpha, grid_h, grid_w);
    double min_mod = 1e300;
    int amr = 0, amc = 0;
    for (int r = 0; r < grid_h; ++r)
        for (int c = 0; c < grid_w; ++c) {
            const double m = std::hypot(d.re.at(r, c), d.im.at(r, c));
            if (m < min_mod) {
                min_mod = m;
                amr = r;
                amc = c;
            }
        }
    if (min_mod <= 1e-12) {
        std::ostringstream os;
        os << "correction_filter_exact: denominator modulus " << min_mod
           << " at frequency (" << amr << ", " << amc
           << ") is below 1e-12; invertibility condition violated";
        throw NumericError(os.str());
    }
    CorrectionFilter h;
    h.spectrum = Spectrum(grid_h, grid_w);
    for (size_t i = 0; i < h.spectrum.re.size(); ++i) {
        const double s = d.re[i] * d.re[i] + d.im[i] * d.im[i];
        h.spectrum.re[i] = d.re[i] / s;
        h.spectrum.im[i] = -d.im[i] / s;
    }
    h.grid_h = grid_h;
    h.grid_w = grid_w;
    h.epsilon = 0.0;
    h.variant = CorrectionFilter::Variant::exact_h0;
    return h;
}

CorrectionFilter correction_filter(const Kernel& k, int alpha,
                                   int grid_h, int grid_w, double epsilon) {
    if (epsilon < 0.0)
        throw std::invalid_argument("correction_filter: epsilon < 0");
    const Spectrum numer = numerator_spectrum(alpha, grid_h, grid_w);
    const Spectrum d = denominator_spectrum(k, alpha, grid_h, grid_w);
    CorrectionFilter h;
    h.spectrum = Spectrum(grid_h, grid_w);
    for (size_t i = 0; i < h.spectrum.re.size(); ++i) {
        const double s = d.re[i] * d.re[i] + d.im[i] * d.im[i] + epsilon;
        const double mr = d.re[i] / s, mi = -d.im[i] / s;
        h.spectrum.re[i] = numer.re[i] * mr - numer.im[i] * mi;
        h.spectrum.im[i] = numer.re[i] * mi + numer.im[i] * mr;
    }
    h.grid_h = grid_h;
    h.grid_w = grid_w;
    h.epsilon = epsilon;
    h.variant = CorrectionFilter::Variant::regularized_h;
    return h;
}

Grid apply_correction_grid(const Grid& y, const CorrectionFilter& h) {
    if (y.height() != h.grid_h || y.width() != h.grid_w)
        throw std::invalid_argument("apply_correction: grid size mismatch");
    return apply_spectrum(y, h.spectrum);
}

Image apply_correction(const Image& y, const CorrectionFilter& h) {
    Image out;
    out.channels.reserve(y.channels.size());
    for (const Grid& ch : y.channels)
        out.channels.push_back(apply_correction_grid(ch, h));
    return out;
}

DiagnosticReport invertibility_diagnostic(const Kernel& k, int alpha,
                                          int grid_h, int grid_w,
                                          double threshold) {
    const Spectrum d = denominator_spectrum(k, alpha, grid_h, grid_w);
    DiagnosticReport rep;
    rep.threshold = threshold;
    rep.min_modulus = 1e300;
    for (int r = 0; r < grid_h; ++r)
        for (int c = 0; c < grid_w; ++c) {
            const double m = std::hypot(d.re.at(r, c), d.im.at(r, c));
            if (m < rep.min_modulus) {
                rep.min_modulus = m;
                rep.argmin_row = r;
                rep.argmin_col = c;
            }
        }
    rep.pass = rep.min_modulus > threshold;
    return rep;
}

Kernel spatial_filter(const CorrectionFilter& h, int crop) {
    const Grid spatial = idft2(h.spectrum);
    const int ch = std::min(crop, h.grid_h);
    const int cw = std::min(crop, h.grid_w);
    Kernel k;
    k.taps = Grid(ch, cw);
    k.center_row = ch / 2;
    k.center_col = cw / 2;
    for (int r = 0; r < ch; ++r)
        for (int c = 0; c < cw; ++c)
            k.taps.at(r, c) = spatial.at(mod(r - k.center_row, h.grid_h),
                                         mod(c - k.center_col, h.grid_w));
    return k;
}

} // namespace corrfilt
