#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "corrfilt/correction.hpp"
#include "corrfilt/estimate.hpp"
#include "corrfilt/image.hpp"
#include "corrfilt/kernels.hpp"
#include "corrfilt/metrics.hpp"
#include "corrfilt/operators.hpp"
#include "corrfilt/resolver.hpp"

using json = nlohmann::json;
using namespace corrfilt;

namespace {

std::string fmt6(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Builds a correction filter for an LR grid either from a downscaling kernel
// (closed form) or from stored spatial filter taps.
CorrectionFilter filter_for(const std::string& kernel_path,
                            const std::string& filter_path, int scale,
                            double eps, int grid_h, int grid_w) {
    if (!filter_path.empty()) {
        const Kernel taps = load_kernel(filter_path);
        CorrectionFilter h;
        h.spectrum = dft2(center_shift_folded(taps, grid_h, grid_w));
        h.grid_h = grid_h;
        h.grid_w = grid_w;
        h.epsilon = eps;
        h.variant = CorrectionFilter::Variant::regularized_h;
        return h;
    }
    const Kernel k = load_kernel(kernel_path);
    return correction_filter(k, scale, grid_h, grid_w, eps);
}

struct Options {
    std::string type, out, hr, lr, kernel, filter, a_path, b_path;
    std::string out_kernel, out_filter, out_report, resolver_cmd;
    std::string grid = "32x32";
    int scale = 2, size = 0, width = 4, border = 0, iters = 250;
    double sigma = 1.0, eps = 1e-14, threshold = 1e-6, timeout = 300.0;
    double lr_gamma = 1e-4, huber_delta = 1.0, lambda_cen = 1.0,
           lambda_sparse = 1.0;
    bool json_out = false, sweep = false;
};

void parse_grid(const std::string& s, int& h, int& w) {
    const auto x = s.find('x');
    if (x == std::string::npos)
        throw CLI::ValidationError("--grid", "expected HxW, e.g. 32x32");
    h = std::stoi(s.substr(0, x));
    w = std::stoi(s.substr(x + 1));
    if (h < 1 || w < 1) throw CLI::ValidationError("--grid", "dims must be >= 1");
}

int cmd_make_kernel(const Options& o) {
    Kernel k;
    if (o.type == "bicubic") {
        k = bicubic_kernel(o.scale);
    } else if (o.type == "gaussian") {
        int size = o.size;
        if (size == 0) size = 2 * static_cast<int>(std::ceil(4.0 * o.sigma)) + 1;
        k = gaussian_kernel(o.sigma, size);
    } else if (o.type == "box") {
        k = box_kernel(o.width);
    } else {
        throw CLI::ValidationError("type", "unknown kernel type '" + o.type + "'");
    }
    save_kernel(k, o.out);
    if (o.json_out) {
        json j{{"type", o.type}, {"height", k.height()}, {"width", k.width()},
               {"sum", k.taps.sum()}, {"out", o.out}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "wrote " << k.height() << "x" << k.width() << " kernel (sum "
                  << fmt6(k.taps.sum()) << ") to " << o.out << "\n";
    }
    return 0;
}

int cmd_synth(const Options& o) {
    const Image hr = load_image(o.hr);
    const SamplingConfig cfg{load_kernel(o.kernel), o.scale, 0, 0};
    save_image(downsample(hr, cfg), o.out);
    return 0;
}

int cmd_correct(const Options& o) {
    const Image lr = load_image(o.lr);
    if (o.sweep) {
        // Reports the filter's peak spectral gain across a decade sweep of
        // the regularizer.
        const Kernel k = load_kernel(o.kernel);
        json sweep = json::array();
        for (double e = 1e-2; e >= 1e-15; e *= 0.1) {
            const CorrectionFilter h =
                correction_filter(k, o.scale, lr.height(), lr.width(), e);
            double max_gain = 0.0;
            for (size_t i = 0; i < h.spectrum.re.size(); ++i)
                max_gain = std::max(max_gain, std::hypot(h.spectrum.re[i],
                                                         h.spectrum.im[i]));
            if (o.json_out)
                sweep.push_back({{"eps", e}, {"max_gain", max_gain}});
            else
                std::cout << "eps " << fmt6(e) << " max_gain " << fmt6(max_gain)
                          << "\n";
        }
        if (o.json_out) std::cout << json{{"sweep", sweep}}.dump() << "\n";
    }
    const CorrectionFilter h =
        filter_for(o.kernel, "", o.scale, o.eps, lr.height(), lr.width());
    save_image(apply_correction(lr, h), o.out);
    return 0;
}

int cmd_estimate(const Options& o) {
    const Image lr = load_image(o.lr);
    EstimationHyper hp;
    hp.learning_rate = o.lr_gamma;
    hp.iterations = o.iters;
    hp.filter_epsilon = o.eps;
    hp.huber_delta = o.huber_delta;
    hp.lambda_cen = o.lambda_cen;
    hp.lambda_sparse = o.lambda_sparse;

    std::ofstream report;
    std::ostream* rep = nullptr;
    if (!o.out_report.empty()) {
        report.open(o.out_report);
        if (!report) throw IoError("cannot open report file: " + o.out_report);
        rep = &report;
    }
    const EstimationResult res = estimate_correction(lr, o.scale, hp, rep);
    if (!o.out_kernel.empty()) save_kernel(res.kernel, o.out_kernel);
    if (!o.out_filter.empty()) {
        const Kernel taps = spatial_filter(res.filter);
        save_kernel(taps, o.out_filter,
                    "GRID " + std::to_string(res.filter.grid_h) + " " +
                        std::to_string(res.filter.grid_w) + " EPS " +
                        std::to_string(res.filter.epsilon));
    }
    const LossParts& last = res.trace.back();
    if (o.json_out) {
        json j{{"iterations", o.iters},
               {"final_loss", last.total},
               {"final_fidelity", last.fidelity},
               {"kernel_mass", res.kernel.taps.sum()}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "final loss " << fmt6(last.total) << " fidelity "
                  << fmt6(last.fidelity) << " kernel mass "
                  << fmt6(res.kernel.taps.sum()) << "\n";
    }
    return 0;
}

int cmd_upscale(const Options& o) {
    const Image lr = load_image(o.lr);
    if (o.kernel.empty() && o.filter.empty())
        throw CLI::ValidationError("upscale", "need --kernel or --filter");
    const CorrectionFilter h = filter_for(o.kernel, o.filter, o.scale, o.eps,
                                          lr.height(), lr.width());
    ResolverSpec spec;
    if (!o.resolver_cmd.empty()) {
        spec.kind = ResolverSpec::Kind::external;
        spec.command_template = o.resolver_cmd;
        spec.timeout_seconds = o.timeout;
    } else {
        spec.builtin_epsilon = o.eps;
    }
    save_image(super_resolve(lr, h, o.scale, spec), o.out);
    return 0;
}

int cmd_evaluate(const Options& o) {
    const Image a = load_image(o.a_path);
    const Image b = load_image(o.b_path);
    const MetricReport rep = evaluate(a, b, o.border);
    if (o.json_out) {
        json j{{"psnr", std::isinf(rep.psnr) ? json("inf") : json(rep.psnr)},
               {"ssim", rep.ssim},
               {"border", rep.border_shaved}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << fmt6(rep.psnr) << " " << fmt6(rep.ssim) << "\n";
    }
    return 0;
}

int cmd_diagnose(const Options& o) {
    int gh = 0, gw = 0;
    parse_grid(o.grid, gh, gw);
    const Kernel k = load_kernel(o.kernel);
    const DiagnosticReport rep =
        invertibility_diagnostic(k, o.scale, gh, gw, o.threshold);
    if (o.json_out) {
        json j{{"min_modulus", rep.min_modulus},
               {"argmin", {rep.argmin_row, rep.argmin_col}},
               {"threshold", rep.threshold},
               {"pass", rep.pass}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "min |F_denom| " << fmt6(rep.min_modulus) << " at ("
                  << rep.argmin_row << ", " << rep.argmin_col << ") verdict "
                  << (rep.pass ? "pass" : "fail") << "\n";
    }
    return rep.pass ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correction-filter toolkit for arbitrary-kernel super-resolution"};
    app.require_subcommand(1);
    Options o;

    auto* mk = app.add_subcommand("make-kernel", "Generate a downscaling kernel");
    mk->add_option("type", o.type, "bicubic | gaussian | box")->required();
    mk->add_option("--scale", o.scale, "scale factor (bicubic)");
    mk->add_option("--sigma", o.sigma, "std in HR pixels (gaussian)");
    mk->add_option("--size", o.size, "tap count per axis (gaussian, odd)");
    mk->add_option("--width", o.width, "box width in taps");
    mk->add_option("--out", o.out, "output KERN file")->required();
    mk->add_flag("--json", o.json_out);

    auto* sy = app.add_subcommand("synth", "Downscale an HR image with a kernel");
    sy->add_option("hr", o.hr, "HR image (PGM/PPM)")->required();
    sy->add_option("--kernel", o.kernel, "KERN file")->required();
    sy->add_option("--scale", o.scale)->required();
    sy->add_option("--out", o.out)->required();

    auto* co = app.add_subcommand("correct", "Apply the closed-form correction filter");
    co->add_option("lr", o.lr, "LR image")->required();
    co->add_option("--kernel", o.kernel, "true downscaling kernel")->required();
    co->add_option("--scale", o.scale)->required();
    co->add_option("--eps", o.eps, "regularization epsilon");
    co->add_option("--out", o.out)->required();
    co->add_flag("--sweep", o.sweep, "print an epsilon sweep report");
    co->add_flag("--json", o.json_out);

    auto* es = app.add_subcommand("estimate", "Blind correction-filter estimation");
    es->add_option("lr", o.lr, "LR image")->required();
    es->add_option("--scale", o.scale)->required();
    es->add_option("--eps", o.eps, "filter epsilon");
    es->add_option("--lr-rate,--gamma", o.lr_gamma, "Adam learning rate");
    es->add_option("--iters", o.iters, "iterations");
    es->add_option("--huber-delta", o.huber_delta);
    es->add_option("--lambda-cen", o.lambda_cen);
    es->add_option("--lambda-sparse", o.lambda_sparse);
    es->add_option("--out-kernel", o.out_kernel);
    es->add_option("--out-filter", o.out_filter);
    es->add_option("--out-report", o.out_report);
    es->add_flag("--json", o.json_out);

    auto* up = app.add_subcommand("upscale", "Correct then super-resolve");
    up->add_option("lr", o.lr, "LR image")->required();
    up->add_option("--scale", o.scale)->required();
    up->add_option("--kernel", o.kernel, "build filter from this kernel");
    up->add_option("--filter", o.filter, "use stored spatial filter taps");
    up->add_option("--eps", o.eps);
    up->add_option("--resolver-cmd", o.resolver_cmd,
                   "external command with {in} {out} {scale}");
    up->add_option("--timeout", o.timeout, "external resolver timeout (s)");
    up->add_option("--out", o.out)->required();

    auto* ev = app.add_subcommand("evaluate", "PSNR/SSIM between two images");
    ev->add_option("a", o.a_path)->required();
    ev->add_option("b", o.b_path)->required();
    ev->add_option("--border", o.border, "pixels shaved on each side");
    ev->add_flag("--json", o.json_out);

    auto* di = app.add_subcommand("diagnose", "Invertibility condition report");
    di->add_option("--kernel", o.kernel)->required();
    di->add_option("--scale", o.scale)->required();
    di->add_option("--grid", o.grid, "LR grid size HxW");
    di->add_option("--threshold", o.threshold);
    di->add_flag("--json", o.json_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? 0 : 2;
    }

    try {
        if (mk->parsed()) return cmd_make_kernel(o);
        if (sy->parsed()) return cmd_synth(o);
        if (co->parsed()) return cmd_correct(o);
        if (es->parsed()) return cmd_estimate(o);
        if (up->parsed()) return cmd_upscale(o);
        if (ev->parsed()) return cmd_evaluate(o);
        if (di->parsed()) return cmd_diagnose(o);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
