#include <cmath>

#include "corrfilt/kernels.hpp"
#include "corrfilt/operators.hpp"

namespace corrfilt {

namespace {

void check_cfg(const SamplingConfig& cfg) {
    if (cfg.scale < 1)
        throw std::invalid_argument("SamplingConfig: scale must be >= 1");
    if (cfg.phase_row < 0 || cfg.phase_row >= cfg.scale || cfg.phase_col < 0 ||
        cfg.phase_col >= cfg.scale)
        throw std::invalid_argument("SamplingConfig: phase out of [0, scale)");
}

// Symmetric reflection (no edge repeat) up to the next multiple of alpha.
Grid reflect_pad(const Grid& x, int target_h, int target_w) {
    Grid out(target_h, target_w);
    for (int r = 0; r < target_h; ++r) {
        int sr = r < x.height() ? r : 2 * x.height() - 2 - r;
        sr = std::max(0, std::min(sr, x.height() - 1));
        for (int c = 0; c < target_w; ++c) {
            int sc = c < x.width() ? c : 2 * x.width() - 2 - c;
            sc = std::max(0, std::min(sc, x.width() - 1));
            out.at(r, c) = x.at(sr, sc);
        }
    }
    return out;
}

} // namespace

Grid downsample_grid(const Grid& x, const SamplingConfig& cfg, bool pad) {
    check_cfg(cfg);
    const int a = cfg.scale;
    const Grid* src = &x;
    Grid padded;
    if (x.height() % a != 0 || x.width() % a != 0) {
        if (!pad)
            throw std::invalid_argument(
                "downsample: dimensions not divisible by scale and padding disabled");
        const int th = (x.height() + a - 1) / a * a;
        const int tw = (x.width() + a - 1) / a * a;
        padded = reflect_pad(x, th, tw);
        src = &padded;
    }
    Grid blurred = cyclic_convolve(*src, cfg.kernel);
    Grid out(src->height() / a, src->width() / a);
    for (int r = 0; r < out.height(); ++r)
        for (int c = 0; c < out.width(); ++c)
            out.at(r, c) = blurred.at(a * r + cfg.phase_row, a * c + cfg.phase_col);
    return out;
}

Grid upsample_grid(const Grid& y, const SamplingConfig& cfg) {
    check_cfg(cfg);
    const int a = cfg.scale;
    Grid z(y.height() * a, y.width() * a);
    for (int r = 0; r < y.height(); ++r)
        for (int c = 0; c < y.width(); ++c)
            z.at(a * r + cfg.phase_row, a * c + cfg.phase_col) = y.at(r, c);
    return cyclic_convolve(z, flip(cfg.kernel));
}

Image downsample(const Image& x, const SamplingConfig& cfg, bool pad) {
    Image out;
    out.channels.reserve(x.channels.size());
    for (const Grid& ch : x.channels)
        out.channels.push_back(downsample_grid(ch, cfg, pad));
    return out;
}

Image upsample(const Image& y, const SamplingConfig& cfg) {
    Image out;
    out.channels.reserve(y.channels.size());
    for (const Grid& ch : y.channels)
        out.channels.push_back(upsample_grid(ch, cfg));
    return out;
}

Grid pseudo_inverse_reconstruct_grid(const Grid& y, int alpha, double epsilon) {
    if (alpha < 1)
        throw std::invalid_argument("pseudo_inverse_reconstruct: alpha < 1");
    if (epsilon < 0.0)
        throw std::invalid_argument("pseudo_inverse_reconstruct: epsilon < 0");
    const Kernel kb = bicubic_kernel(alpha);
    const Kernel autoc = linear_convolve(kb, flip(kb));
    const Kernel sub = subsample_kernel(autoc, alpha);
    const Grid emb = center_shift_folded(sub, y.height(), y.width());
    const Spectrum g = dft2(emb);

    double min_mod2 = 1e300;
    for (size_t i = 0; i < g.re.size(); ++i)
        min_mod2 = std::min(min_mod2, g.re[i] * g.re[i] + g.im[i] * g.im[i]);
    if (min_mod2 + epsilon < 1e-24)
        throw NumericError(
            "pseudo_inverse_reconstruct: denominator underflow, min modulus " +
            std::to_string(std::sqrt(min_mod2)));

    // Z = Y * conj(G) / (|G|^2 + eps)
    Spectrum mul(y.height(), y.width());
    for (size_t i = 0; i < mul.re.size(); ++i) {
        const double s = g.re[i] * g.re[i] + g.im[i] * g.im[i] + epsilon;
        mul.re[i] = g.re[i] / s;
        mul.im[i] = -g.im[i] / s;
    }
    Grid z = apply_spectrum(y, mul);
    SamplingConfig cfg{kb, alpha, 0, 0};
    return upsample_grid(z, cfg);
}

Image pseudo_inverse_reconstruct(const Image& y, int alpha, double epsilon) {
    Image out;
    out.channels.reserve(y.channels.size());
    for (const Grid& ch : y.channels)
        out.channels.push_back(pseudo_inverse_reconstruct_grid(ch, alpha, epsilon));
    return out;
}

} // namespace corrfilt
