#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>

#include "corrfilt/spectral.hpp"

namespace corrfilt {

namespace {

// FFTW planning is not thread-safe; execution through fftw_execute_dft on
// fftw_malloc'd arrays is. Plans are cached per (h, w, sign).
class FftPlanCache {
public:
    static FftPlanCache& instance() {
        static FftPlanCache cache;
        return cache;
    }

    fftw_plan get(int h, int w, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(h, w, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        fftw_complex* in = fftw_alloc_complex(static_cast<size_t>(h) * w);
        fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(h) * w);
        fftw_plan p = fftw_plan_dft_2d(h, w, in, out, sign, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

struct FftwBuffer {
    fftw_complex* p;
    explicit FftwBuffer(size_t n) : p(fftw_alloc_complex(n)) {}
    ~FftwBuffer() { fftw_free(p); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

void run_fft(const Spectrum& in, Spectrum& out, int sign) {
    const int h = in.height(), w = in.width();
    const size_t n = static_cast<size_t>(h) * w;
    FftwBuffer bin(n), bout(n);
    for (size_t i = 0; i < n; ++i) {
        bin.p[i][0] = in.re[i];
        bin.p[i][1] = in.im[i];
    }
    fftw_plan plan = FftPlanCache::instance().get(h, w, sign);
    fftw_execute_dft(plan, bin.p, bout.p);
    for (size_t i = 0; i < n; ++i) {
        out.re[i] = bout.p[i][0];
        out.im[i] = bout.p[i][1];
    }
}

} // namespace

Spectrum dft2(const Grid& g) {
    Spectrum in(g.height(), g.width());
    in.re = g;
    Spectrum out(g.height(), g.width());
    run_fft(in, out, FFTW_FORWARD);
    return out;
}

Grid idft2(const Spectrum& s) {
    const int h = s.height(), w = s.width();
    Spectrum out(h, w);
    run_fft(s, out, FFTW_BACKWARD);
    const double norm = 1.0 / (static_cast<double>(h) * w);
    double max_re = 0.0, max_im = 0.0;
    for (size_t i = 0; i < out.re.size(); ++i) {
        max_re = std::max(max_re, std::abs(out.re[i]));
        max_im = std::max(max_im, std::abs(out.im[i]));
    }
    if (max_im > 1e-8 * std::max(max_re, 1e-300))
        throw NumericError("idft2: non-Hermitian input, imaginary residue " +
                           std::to_string(max_im * norm));
    Grid g(h, w);
    for (size_t i = 0; i < g.size(); ++i) g[i] = out.re[i] * norm;
    return g;
}

Kernel flip(const Kernel& k) {
    const int h = k.height(), w = k.width();
    Kernel f;
    f.taps = Grid(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            f.taps.at(r, c) = k.taps.at(h - 1 - r, w - 1 - c);
    f.center_row = h - 1 - k.center_row;
    f.center_col = w - 1 - k.center_col;
    return f;
}

namespace {

Grid embed(const Kernel& k, int height, int width, bool fold) {
    if (!fold && (k.height() > height || k.width() > width))
        throw std::invalid_argument("center_shift: kernel larger than grid");
    Grid g(height, width);
    for (int r = 0; r < k.height(); ++r)
        for (int c = 0; c < k.width(); ++c)
            g.at(mod(r - k.center_row, height), mod(c - k.center_col, width)) +=
                k.taps.at(r, c);
    return g;
}

} // namespace

Grid center_shift(const Kernel& k, int height, int width) {
    return embed(k, height, width, false);
}

Grid center_shift_folded(const Kernel& k, int height, int width) {
    return embed(k, height, width, true);
}

Grid cyclic_convolve(const Grid& g, const Kernel& k) {
    return apply_spectrum(g, dft2(center_shift(k, g.height(), g.width())));
}

Kernel linear_convolve(const Kernel& a, const Kernel& b) {
    Kernel out;
    out.taps = Grid(a.height() + b.height() - 1, a.width() + b.width() - 1);
    out.center_row = a.center_row + b.center_row;
    out.center_col = a.center_col + b.center_col;
    for (int ra = 0; ra < a.height(); ++ra)
        for (int ca = 0; ca < a.width(); ++ca) {
            const double va = a.taps.at(ra, ca);
            if (va == 0.0) continue;
            for (int rb = 0; rb < b.height(); ++rb)
                for (int cb = 0; cb < b.width(); ++cb)
                    out.taps.at(ra + rb, ca + cb) += va * b.taps.at(rb, cb);
        }
    return out;
}

Kernel subsample_kernel(const Kernel& q, int alpha) {
    if (alpha < 1) throw std::invalid_argument("subsample_kernel: alpha < 1");
    const auto lo = [alpha](int c) { return -((c) / alpha); };
    const auto hi = [alpha](int c, int n) { return (n - 1 - c) / alpha; };
    const int r0 = lo(q.center_row), r1 = hi(q.center_row, q.height());
    const int c0 = lo(q.center_col), c1 = hi(q.center_col, q.width());
    Kernel out;
    out.taps = Grid(r1 - r0 + 1, c1 - c0 + 1);
    out.center_row = -r0;
    out.center_col = -c0;
    for (int j = r0; j <= r1; ++j)
        for (int i = c0; i <= c1; ++i)
            out.taps.at(j - r0, i - c0) =
                q.taps.at(q.center_row + alpha * j, q.center_col + alpha * i);
    return out;
}

Spectrum spec_mul(const Spectrum& a, const Spectrum& b) {
    Spectrum out(a.height(), a.width());
    for (size_t i = 0; i < out.re.size(); ++i) {
        out.re[i] = a.re[i] * b.re[i] - a.im[i] * b.im[i];
        out.im[i] = a.re[i] * b.im[i] + a.im[i] * b.re[i];
    }
    return out;
}

Spectrum spec_conj(const Spectrum& s) {
    Spectrum out = s;
    for (size_t i = 0; i < out.im.size(); ++i) out.im[i] = -out.im[i];
    return out;
}

Grid apply_spectrum(const Grid& g, const Spectrum& s) {
    return idft2(spec_mul(dft2(g), s));
}

} // namespace corrfilt
