#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "corrfilt/correction.hpp"
#include "corrfilt/kernels.hpp"
#include "corrfilt/operators.hpp"
#include "test_support.hpp"

using namespace corrfilt;
using namespace testsup;

TEST_CASE("cubic_profile: knot values and 1.5 sample") {
    CHECK(cubic_profile(0.0) == doctest::Approx(1.0));
    CHECK(cubic_profile(1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(cubic_profile(2.0)) < 1e-12);
    CHECK(cubic_profile(0.5) == doctest::Approx(0.5625));
    CHECK(cubic_profile(1.5) == doctest::Approx(-0.0625));
    CHECK(cubic_profile(-1.5) == doctest::Approx(-0.0625));
    CHECK(cubic_profile(2.5) == 0.0);
}

TEST_CASE("bicubic_kernel: scale 1 degenerates to a delta") {
    const Kernel k = bicubic_kernel(1);
    CHECK(k.height() == 4);
    CHECK(k.center_row == 2);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            CHECK(k.taps.at(r, c) == doctest::Approx(r == 2 && c == 2 ? 1.0 : 0.0));
}

TEST_CASE("bicubic_kernel: separable, normalized, matches the profile") {
    for (int alpha : {2, 3, 4}) {
        const Kernel k = bicubic_kernel(alpha);
        CHECK(k.height() == 4 * alpha);
        CHECK(k.width() == 4 * alpha);
        CHECK(k.center_row == 2 * alpha);
        CHECK(k.taps.sum() == doctest::Approx(1.0).epsilon(1e-12));

        std::vector<double> axis(4 * alpha);
        double psum = 0.0;
        for (int i = 0; i < 4 * alpha; ++i) {
            axis[i] = cubic_profile((i - 2.0 * alpha) / alpha);
            psum += axis[i];
        }
        for (double& v : axis) v /= psum;
        for (int r = 0; r < 4 * alpha; ++r)
            for (int c = 0; c < 4 * alpha; ++c)
                CHECK(k.taps.at(r, c) ==
                      doctest::Approx(axis[r] * axis[c]).epsilon(1e-12));
    }
}

TEST_CASE("bicubic_kernel: scale 2 axis values") {
    const Kernel k = bicubic_kernel(2);
    // profile at t = -2,-1.5,...,1.5 over a row through the center, /2
    const double axis[8] = {0.0, -0.03125, 0.0, 0.28125,
                            0.5, 0.28125, 0.0, -0.03125};
    for (int c = 0; c < 8; ++c)
        CHECK(k.taps.at(4, c) == doctest::Approx(axis[c] * 0.5).epsilon(1e-12));
}

TEST_CASE("gaussian_kernel: shape, ratio oracle, second moment") {
    const double sigma = 1.5;
    const Kernel k = gaussian_kernel(sigma, 21);
    CHECK(k.center_row == 10);
    CHECK(k.taps.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.taps.at(10, 11) / k.taps.at(10, 10) ==
          doctest::Approx(std::exp(-1.0 / (2.0 * sigma * sigma))).epsilon(1e-12));

    double var = 0.0;
    for (int r = 0; r < 21; ++r)
        for (int c = 0; c < 21; ++c)
            var += (c - 10.0) * (c - 10.0) * k.taps.at(r, c);
    CHECK(var == doctest::Approx(sigma * sigma).epsilon(1e-3));

    CHECK_THROWS_AS(gaussian_kernel(1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_kernel(-1.0, 5), std::invalid_argument);
}

TEST_CASE("box_kernel and delta_kernel") {
    const Kernel b = box_kernel(4);
    CHECK(b.height() == 4);
    CHECK(b.center_row == 2);
    for (size_t i = 0; i < b.taps.size(); ++i)
        CHECK(b.taps[i] == doctest::Approx(1.0 / 16.0));

    const Kernel d = delta_kernel(5);
    CHECK(d.taps.at(2, 2) == 1.0);
    CHECK(d.taps.sum() == 1.0);
    CHECK(delta_kernel().height() == 1);
}

TEST_CASE("kernel file round-trip; sidecar line is ignored on load") {
    std::mt19937 rng(5);
    const Kernel k = random_kernel(5, 4, rng);
    const std::string path = "/tmp/corrfilt_kern_rt.txt";
    save_kernel(k, path, "GRID 32 32 EPS 1e-14");
    const Kernel back = load_kernel(path);
    CHECK(back.height() == 5);
    CHECK(back.width() == 4);
    CHECK(back.center_row == k.center_row);
    CHECK(back.center_col == k.center_col);
    CHECK(max_abs_diff(back.taps, k.taps) < 1e-15);
    std::remove(path.c_str());
}

TEST_CASE("load_kernel: malformed inputs raise IoError") {
    const std::string path = "/tmp/corrfilt_kern_bad.txt";
    {
        std::ofstream out(path);
        out << "KERN 2\n2 2 0 0\n1 2\n3 4\n";
    }
    CHECK_THROWS_AS(load_kernel(path), IoError);
    {
        std::ofstream out(path);
        out << "KERN 1\n2 2 5 0\n1 2\n3 4\n";
    }
    CHECK_THROWS_AS(load_kernel(path), IoError);
    {
        std::ofstream out(path);
        out << "KERN 1\n3 3 1 1\n1 2 3\n";
    }
    CHECK_THROWS_AS(load_kernel(path), IoError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_kernel("/nonexistent/kern.txt"), IoError);
}

TEST_CASE("denominator_spectrum with the bicubic kernel equals the numerator") {
    for (int alpha : {2, 3}) {
        const Spectrum d = denominator_spectrum(bicubic_kernel(alpha), alpha, 16, 16);
        const Spectrum n = numerator_spectrum(alpha, 16, 16);
        CHECK(max_abs_diff(d.re, n.re) < 1e-12);
        CHECK(max_abs_diff(d.im, n.im) < 1e-12);
    }
}

TEST_CASE("denominator_spectrum DC value is 1/alpha^2 for unit-sum kernels") {
    for (int alpha : {2, 4}) {
        for (const Kernel& k : {bicubic_kernel(alpha),
                                gaussian_kernel(0.75 * alpha, 6 * alpha + 1),
                                box_kernel(2 * alpha)}) {
            const Spectrum d = denominator_spectrum(k, alpha, 24, 24);
            CHECK(d.re.at(0, 0) ==
                  doctest::Approx(1.0 / (alpha * alpha)).epsilon(1e-10));
            CHECK(std::abs(d.im.at(0, 0)) < 1e-12);
        }
    }
}

TEST_CASE("exact filter is the spectral reciprocal of the denominator") {
    const Kernel k = gaussian_kernel(1.0, 9);
    const int alpha = 2, n = 16;
    const CorrectionFilter h0 = correction_filter_exact(k, alpha, n, n);
    CHECK(h0.variant == CorrectionFilter::Variant::exact_h0);
    const Spectrum d = denominator_spectrum(k, alpha, n, n);
    for (size_t i = 0; i < d.re.size(); ++i) {
        const double prod_re =
            h0.spectrum.re[i] * d.re[i] - h0.spectrum.im[i] * d.im[i];
        const double prod_im =
            h0.spectrum.re[i] * d.im[i] + h0.spectrum.im[i] * d.re[i];
        CHECK(prod_re == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(prod_im) < 1e-10);
    }
}

TEST_CASE("exact filter refuses singular denominators") {
    // a 4-tap box at stride 2 has an exact spectral null at the LR Nyquist
    // frequency, so the inverse does not exist on even grids
    CHECK_THROWS_AS(correction_filter_exact(box_kernel(4), 2, 32, 32),
                    NumericError);
    const DiagnosticReport rep = invertibility_diagnostic(box_kernel(4), 2, 32, 32);
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_modulus < 1e-12);
    // every zero lies on the Nyquist row or column
    CHECK((rep.argmin_row == 16 || rep.argmin_col == 16));
}

TEST_CASE("regularized filter tends to numerator/denominator as eps -> 0") {
    const Kernel k = gaussian_kernel(1.06, 13);
    const int alpha = 2, n = 32;
    const CorrectionFilter h = correction_filter(k, alpha, n, n, 1e-14);
    const CorrectionFilter h0 = correction_filter_exact(k, alpha, n, n);
    const Spectrum g = numerator_spectrum(alpha, n, n);
    const Spectrum ref = spec_mul(g, h0.spectrum);
    CHECK(max_abs_diff(h.spectrum.re, ref.re) < 1e-6);
    CHECK(max_abs_diff(h.spectrum.im, ref.im) < 1e-6);
}

TEST_CASE("bicubic acquisition yields an identity correction filter") {
    std::mt19937 rng(19);
    const int alpha = 2, n = 24;
    const CorrectionFilter h =
        correction_filter(bicubic_kernel(alpha), alpha, n, n, 1e-14);
    const Grid y = random_grid(n, n, rng);
    CHECK(max_abs_diff(apply_correction_grid(y, h), y) < 1e-8);

    const Kernel taps = spatial_filter(h, 11);
    CHECK(taps.taps.at(taps.center_row, taps.center_col) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(taps.taps.sum() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("corrected observation mimics the bicubic observation on range(R)") {
    std::mt19937 rng(23);
    for (int alpha : {2, 4}) {
        const int lr_n = 16, hr_n = lr_n * alpha;
        SamplingConfig bic{bicubic_kernel(alpha), alpha, 0, 0};
        const Grid x = upsample_grid(random_grid(lr_n, lr_n, rng), bic);

        const Kernel k = gaussian_kernel(0.75 * alpha, 4 * alpha + 1);
        SamplingConfig acq{k, alpha, 0, 0};
        const Grid y_k = downsample_grid(x, acq);
        const Grid y_b = downsample_grid(x, bic);

        const CorrectionFilter h = correction_filter(k, alpha, lr_n, lr_n, 1e-14);
        CHECK(max_abs_diff(apply_correction_grid(y_k, h), y_b) < 1e-6);
    }
}

TEST_CASE("correction + pseudo-inverse recovers range(R) signals") {
    std::mt19937 rng(29);
    const int alpha = 2, lr_n = 16;
    SamplingConfig bic{bicubic_kernel(alpha), alpha, 0, 0};
    const Grid x = upsample_grid(random_grid(lr_n, lr_n, rng), bic);
    const Kernel k = gaussian_kernel(1.2, 9);
    SamplingConfig acq{k, alpha, 0, 0};
    const Grid y = downsample_grid(x, acq);
    const CorrectionFilter h = correction_filter(k, alpha, lr_n, lr_n, 1e-14);
    const Grid xhat =
        pseudo_inverse_reconstruct_grid(apply_correction_grid(y, h), alpha, 0.0);
    CHECK(rel_err(xhat, x) < 1e-5);
}

TEST_CASE("apply_correction validates grid dimensions") {
    const CorrectionFilter h = correction_filter(bicubic_kernel(2), 2, 16, 16, 1e-8);
    Grid wrong(8, 8, 0.5);
    CHECK_THROWS_AS(apply_correction_grid(wrong, h), std::invalid_argument);
}

TEST_CASE("invertibility diagnostic separates mild from severe blur") {
    const DiagnosticReport ok =
        invertibility_diagnostic(gaussian_kernel(1.06, 13), 2, 32, 32);
    CHECK(ok.pass);
    CHECK(ok.min_modulus > 1e-6);

    const DiagnosticReport bad =
        invertibility_diagnostic(gaussian_kernel(8.0, 33), 2, 32, 32);
    CHECK_FALSE(bad.pass);
    CHECK(bad.min_modulus < 1e-6);
    CHECK((bad.argmin_row != 0 || bad.argmin_col != 0));
}

TEST_CASE("spatial_filter crops around the center and keeps the DC sum") {
    const Kernel k = gaussian_kernel(1.0, 9);
    const int alpha = 2, n = 64;
    const CorrectionFilter h0 = correction_filter_exact(k, alpha, n, n);
    const Kernel taps = spatial_filter(h0, 65);
    CHECK(taps.height() == 64);  // capped by the grid
    // sum of all taps equals the DC gain 1/D(0) = alpha^2
    const Kernel full = spatial_filter(h0, n);
    CHECK(full.taps.sum() == doctest::Approx(alpha * alpha).epsilon(1e-8));
}
