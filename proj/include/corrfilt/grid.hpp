#ifndef CORRFILT_GRID_HPP
#define CORRFILT_GRID_HPP

#include <cassert>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace corrfilt {

// Thrown on file / image input problems. CLI maps this to exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown on numerical failures (ill-conditioned filter, divergence).
// CLI maps this to exit code 4.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major 2-D grid of doubles. The workhorse container for image
/// channels, kernel taps and the real/imaginary parts of spectra.
class Grid {
public:
    Grid() = default;
    Grid(int height, int width, double fill = 0.0)
        : h_(height), w_(width), v_(static_cast<size_t>(height) * width, fill) {
        if (height <= 0 || width <= 0)
            throw std::invalid_argument("Grid dimensions must be positive");
    }

    int height() const { return h_; }
    int width() const { return w_; }
    size_t size() const { return v_.size(); }

    double& at(int r, int c) {
        assert(r >= 0 && r < h_ && c >= 0 && c < w_);
        return v_[static_cast<size_t>(r) * w_ + c];
    }
    double at(int r, int c) const {
        assert(r >= 0 && r < h_ && c >= 0 && c < w_);
        return v_[static_cast<size_t>(r) * w_ + c];
    }
    double& operator[](size_t i) { return v_[i]; }
    double operator[](size_t i) const { return v_[i]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    bool same_shape(const Grid& o) const { return h_ == o.h_ && w_ == o.w_; }

    double sum() const {
        double s = 0.0;
        for (double x : v_) s += x;
        return s;
    }

private:
    int h_ = 0, w_ = 0;
    std::vector<double> v_;
};

inline int mod(int a, int n) {
    int r = a % n;
    return r < 0 ? r + n : r;
}

} // namespace corrfilt

#endif
