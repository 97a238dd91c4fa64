#include <cmath>
#include <fstream>
#include <sstream>

#include "corrfilt/kernels.hpp"

namespace corrfilt {

double cubic_profile(double t) {
    const double a = -0.5;
    const double x = std::abs(t);
    if (x <= 1.0) return (a + 2.0) * x * x * x - (a + 3.0) * x * x + 1.0;
    if (x < 2.0) return a * x * x * x - 5.0 * a * x * x + 8.0 * a * x - 4.0 * a;
    return 0.0;
}

Kernel bicubic_kernel(int alpha) {
    if (alpha < 1) throw std::invalid_argument("bicubic_kernel: alpha < 1");
    const int size = 4 * alpha;
    const int c = 2 * alpha;
    std::vector<double> profile(size);
    double psum = 0.0;
    for (int i = 0; i < size; ++i) {
        profile[i] = cubic_profile(static_cast<double>(i - c) / alpha);
        psum += profile[i];
    }
    Kernel k;
    k.taps = Grid(size, size);
    k.center_row = c;
    k.center_col = c;
    for (int r = 0; r < size; ++r)
        for (int col = 0; col < size; ++col)
            k.taps.at(r, col) = (profile[r] / psum) * (profile[col] / psum);
    return k;
}

Kernel gaussian_kernel(double sigma, int size) {
    if (sigma <= 0.0) throw std::invalid_argument("gaussian_kernel: sigma <= 0");
    if (size < 1 || size % 2 == 0)
        throw std::invalid_argument("gaussian_kernel: size must be odd");
    const int c = size / 2;
    Kernel k;
    k.taps = Grid(size, size);
    k.center_row = c;
    k.center_col = c;
    double sum = 0.0;
    for (int r = 0; r < size; ++r)
        for (int col = 0; col < size; ++col) {
            const double dy = r - c, dx = col - c;
            const double v = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            k.taps.at(r, col) = v;
            sum += v;
        }
    for (size_t i = 0; i < k.taps.size(); ++i) k.taps[i] /= sum;
    return k;
}

Kernel box_kernel(int width) {
    if (width < 1) throw std::invalid_argument("box_kernel: width < 1");
    Kernel k;
    k.taps = Grid(width, width, 1.0 / (static_cast<double>(width) * width));
    k.center_row = width / 2;
    k.center_col = width / 2;
    return k;
}

Kernel delta_kernel(int size) {
    Kernel k;
    k.taps = Grid(size, size);
    k.center_row = size / 2;
    k.center_col = size / 2;
    k.taps.at(k.center_row, k.center_col) = 1.0;
    return k;
}

Kernel load_kernel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open kernel file: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (!in || magic != "KERN" || version != 1)
        throw IoError("not a KERN v1 file: " + path);
    int h = 0, w = 0, cy = 0, cx = 0;
    in >> h >> w >> cy >> cx;
    if (!in || h < 1 || w < 1 || cy < 0 || cy >= h || cx < 0 || cx >= w)
        throw IoError("malformed KERN header: " + path);
    Kernel k;
    k.taps = Grid(h, w);
    k.center_row = cy;
    k.center_col = cx;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double v;
            if (!(in >> v)) throw IoError("truncated KERN taps: " + path);
            k.taps.at(r, c) = v;
        }
    return k;
}

void save_kernel(const Kernel& k, const std::string& path,
                 const std::string& sidecar) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << "KERN 1\n"
        << k.height() << " " << k.width() << " " << k.center_row << " "
        << k.center_col << "\n";
    out.precision(17);
    for (int r = 0; r < k.height(); ++r) {
        for (int c = 0; c < k.width(); ++c)
            out << (c ? " " : "") << k.taps.at(r, c);
        out << "\n";
    }
    if (!sidecar.empty()) out << sidecar << "\n";
    if (!out) throw IoError("write failed: " + path);
}

} // namespace corrfilt
