#include <cmath>
#include <limits>

#include "corrfilt/metrics.hpp"

namespace corrfilt {

namespace {

void check_pair(const Image& a, const Image& b, int border) {
    if (a.height() != b.height() || a.width() != b.width())
        throw std::invalid_argument("metric inputs have mismatched dimensions");
    if (2 * border >= a.height() || 2 * border >= a.width())
        throw std::invalid_argument("border too large for image dimensions");
}

} // namespace

double psnr(const Image& a, const Image& b, int border) {
    check_pair(a, b, border);
    const Grid la = to_luma(a).channels[0];
    const Grid lb = to_luma(b).channels[0];
    double sum = 0.0;
    long n = 0;
    for (int r = border; r < la.height() - border; ++r) {
        for (int c = border; c < la.width() - border; ++c) {
            const double d = la.at(r, c) - lb.at(r, c);
            sum += d * d;
            ++n;
        }
    }
    const double mse = sum / n;
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b, int border) {
    check_pair(a, b, border);
    const Grid la = to_luma(a).channels[0];
    const Grid lb = to_luma(b).channels[0];
    const int h = la.height() - 2 * border;
    const int w = la.width() - 2 * border;
    if (h < 11 || w < 11)
        throw std::invalid_argument("image too small for 11x11 SSIM window");

    // 11x11 Gaussian window, sigma 1.5, normalized.
    constexpr int W = 11, R = 5;
    double win[W][W];
    double wsum = 0.0;
    for (int i = 0; i < W; ++i)
        for (int j = 0; j < W; ++j) {
            const double dy = i - R, dx = j - R;
            win[i][j] = std::exp(-(dy * dy + dx * dx) / (2.0 * 1.5 * 1.5));
            wsum += win[i][j];
        }
    for (int i = 0; i < W; ++i)
        for (int j = 0; j < W; ++j) win[i][j] /= wsum;

    constexpr double K1 = 0.01, K2 = 0.03, L = 1.0;
    const double c1 = (K1 * L) * (K1 * L);
    const double c2 = (K2 * L) * (K2 * L);

    double total = 0.0;
    long count = 0;
    for (int r = border; r + W <= la.height() - border; ++r) {
        for (int c = border; c + W <= la.width() - border; ++c) {
            double ma = 0, mb = 0, va = 0, vb = 0, cov = 0;
            for (int i = 0; i < W; ++i)
                for (int j = 0; j < W; ++j) {
                    const double x = la.at(r + i, c + j);
                    const double y = lb.at(r + i, c + j);
                    const double wt = win[i][j];
                    ma += wt * x;
                    mb += wt * y;
                    va += wt * x * x;
                    vb += wt * y * y;
                    cov += wt * x * y;
                }
            va -= ma * ma;
            vb -= mb * mb;
            cov -= ma * mb;
            const double num = (2 * ma * mb + c1) * (2 * cov + c2);
            const double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
            total += num / den;
            ++count;
        }
    }
    return total / count;
}

MetricReport evaluate(const Image& a, const Image& b, int border) {
    MetricReport rep;
    rep.psnr = psnr(a, b, border);
    rep.ssim = ssim(a, b, border);
    rep.border_shaved = border;
    return rep;
}

} // namespace corrfilt
