#include <cmath>
#include <ostream>

#include "corrfilt/estimate.hpp"
#include "corrfilt/kernels.hpp"

namespace corrfilt {

namespace {

// out[i] = sum_j big[i+j] * small[j]; out shape = big - small + 1.
Grid valid_corr(const Grid& big, const Grid& small) {
    const int oh = big.height() - small.height() + 1;
    const int ow = big.width() - small.width() + 1;
    if (oh < 1 || ow < 1)
        throw std::invalid_argument("valid_corr: second operand larger than first");
    Grid out(oh, ow);
    for (int r = 0; r < oh; ++r)
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int j = 0; j < small.height(); ++j)
                for (int i = 0; i < small.width(); ++i)
                    s += big.at(r + j, c + i) * small.at(j, i);
            out.at(r, c) = s;
        }
    return out;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double huber_deriv(double r, double delta) {
    if (std::abs(r) <= delta) return r;
    return delta * sign(r);
}

// Everything the backward pass needs from the forward pass.
struct Forward {
    Kernel k01, k012, k;   // partial compositions
    Kernel q;              // k * flip(k_bicub)
    Kernel sub;            // q subsampled by alpha
    Spectrum denom;        // D = dft2(embedded sub)
    Spectrum h_spec;       // correction filter spectrum
    Spectrum y_corr_spec;  // Y * H
    Spectrum k_spec;       // embedded composed kernel on the HR grid
    Spectrum xh_spec;      // dft2(x_h)
    Grid z;                // LR coefficients after the resolver division
    Grid x_h;              // HR resolve
    Grid resid;            // y - yhat
    LossParts loss;
};

void forward_pass(const EstimationState& state, const EstimationContext& ctx,
                  Forward& f) {
    const double eps = state.hyper.filter_epsilon;
    const int lh = ctx.y.height(), lw = ctx.y.width();
    const int a = ctx.alpha;

    f.k01 = linear_convolve(state.factors[0], state.factors[1]);
    f.k012 = linear_convolve(f.k01, state.factors[2]);
    f.k = linear_convolve(f.k012, state.factors[3]);

    f.q = linear_convolve(f.k, ctx.k_bicub_flip);
    f.sub = subsample_kernel(f.q, a);
    f.denom = dft2(center_shift_folded(f.sub, lh, lw));

    // H = F_numer * conj(D) / (|D|^2 + eps)
    f.h_spec = Spectrum(lh, lw);
    for (size_t i = 0; i < f.h_spec.re.size(); ++i) {
        const double p = ctx.f_numer.re[i], q2 = ctx.f_numer.im[i];
        const double ar = f.denom.re[i], bi = f.denom.im[i];
        const double s = ar * ar + bi * bi + eps;
        f.h_spec.re[i] = (p * ar + q2 * bi) / s;
        f.h_spec.im[i] = (q2 * ar - p * bi) / s;
    }

    f.y_corr_spec = spec_mul(ctx.y_spec, f.h_spec);

    // Built-in resolver: divide by the bicubic autocorrelation spectrum,
    // then upsample with the bicubic kernel.
    f.z = idft2(spec_mul(f.y_corr_spec, ctx.resolver_mul));
    SamplingConfig up_cfg{ctx.k_bicub, a, 0, 0};
    f.x_h = upsample_grid(f.z, up_cfg);

    // yhat = (x_h * k) down_alpha with the current kernel estimate
    f.k_spec = dft2(center_shift_folded(f.k, ctx.hr_h, ctx.hr_w));
    f.xh_spec = dft2(f.x_h);
    const Grid blurred = idft2(spec_mul(f.xh_spec, f.k_spec));

    f.resid = Grid(lh, lw);
    for (int r = 0; r < lh; ++r)
        for (int c = 0; c < lw; ++c)
            f.resid.at(r, c) = ctx.y.at(r, c) - blurred.at(a * r, a * c);

    f.loss.fidelity = huber(f.resid, state.hyper.huber_delta);
    f.loss.l1_cen = 0.0;
    f.loss.l1_sparse = 0.0;
    for (size_t i = 0; i < f.k.taps.size(); ++i) {
        f.loss.l1_cen += ctx.m_cen[i] * std::abs(f.k.taps[i]);
        f.loss.l1_sparse += std::abs(f.k.taps[i]);
    }
    f.loss.total = f.loss.fidelity + state.hyper.lambda_cen * f.loss.l1_cen +
                   state.hyper.lambda_sparse * f.loss.l1_sparse;
    if (!std::isfinite(f.loss.total))
        throw NumericError("estimation objective is non-finite");
}

std::array<Grid, 4> backward_pass(const EstimationState& state,
                                  const EstimationContext& ctx, const Forward& f,
                                  bool correction_path, bool downsample_path) {
    const double eps = state.hyper.filter_epsilon;
    const int lh = ctx.y.height(), lw = ctx.y.width();
    const int hh = ctx.hr_h, hw = ctx.hr_w;
    const int a = ctx.alpha;
    const double n_lr = static_cast<double>(lh) * lw;
    const double n_hr = static_cast<double>(hh) * hw;

    // d fidelity / d yhat = -huber'(resid) / Npix
    Grid g_c(hh, hw);
    for (int r = 0; r < lh; ++r)
        for (int c = 0; c < lw; ++c)
            g_c.at(a * r, a * c) =
                -huber_deriv(f.resid.at(r, c), state.hyper.huber_delta) / n_lr;
    const Spectrum g_c_spec = dft2(g_c);

    // Gradient of the composed kernel, accumulated from both paths plus the
    // L1 regularizers.
    Grid g_k(f.k.height(), f.k.width());

    if (downsample_path) {
        // yhat depends on k directly through the blur: g_e = corr(g_c, x_h).
        const Spectrum prod = spec_mul(g_c_spec, spec_conj(f.xh_spec));
        const Grid g_e = idft2(prod);
        for (int r = 0; r < f.k.height(); ++r)
            for (int c = 0; c < f.k.width(); ++c)
                g_k.at(r, c) += g_e.at(mod(r - f.k.center_row, hh),
                                       mod(c - f.k.center_col, hw));
    }

    if (correction_path) {
        // Back through x_h -> z -> Y_corr -> H -> D -> d -> sub -> q -> k.
        const Grid g_xh = idft2(spec_mul(g_c_spec, spec_conj(f.k_spec)));
        SamplingConfig down_cfg{ctx.k_bicub, a, 0, 0};
        const Grid g_z = downsample_grid(g_xh, down_cfg, false);

        // adjoint of idft2: gZ = DFT(g_z) / N
        const Spectrum g_z_spec = dft2(g_z);
        Spectrum g_yc(lh, lw);
        for (size_t i = 0; i < g_yc.re.size(); ++i) {
            const double zr = g_z_spec.re[i] / n_lr, zi = g_z_spec.im[i] / n_lr;
            // g_Ycorr = conj(resolver_mul) * gZ
            g_yc.re[i] = ctx.resolver_mul.re[i] * zr + ctx.resolver_mul.im[i] * zi;
            g_yc.im[i] = ctx.resolver_mul.re[i] * zi - ctx.resolver_mul.im[i] * zr;
        }

        // g_H = conj(Y) * g_Ycorr
        Spectrum g_h(lh, lw);
        for (size_t i = 0; i < g_h.re.size(); ++i) {
            const double yr = ctx.y_spec.re[i], yi = ctx.y_spec.im[i];
            g_h.re[i] = yr * g_yc.re[i] + yi * g_yc.im[i];
            g_h.im[i] = yr * g_yc.im[i] - yi * g_yc.re[i];
        }

        // Real chain rule through H = N conj(D) / (|D|^2 + eps).
        Spectrum g_d(lh, lw);
        for (size_t i = 0; i < g_d.re.size(); ++i) {
            const double p = ctx.f_numer.re[i], q2 = ctx.f_numer.im[i];
            const double ar = f.denom.re[i], bi = f.denom.im[i];
            const double s = ar * ar + bi * bi + eps;
            const double hre = f.h_spec.re[i], him = f.h_spec.im[i];
            const double dhre_da = p / s - 2.0 * ar * hre / s;
            const double dhre_db = q2 / s - 2.0 * bi * hre / s;
            const double dhim_da = q2 / s - 2.0 * ar * him / s;
            const double dhim_db = -p / s - 2.0 * bi * him / s;
            g_d.re[i] = g_h.re[i] * dhre_da + g_h.im[i] * dhim_da;
            g_d.im[i] = g_h.re[i] * dhre_db + g_h.im[i] * dhim_db;
        }

        // adjoint of dft2 of a real grid: Re(DFT(gA)) + Im(DFT(gB))
        const Spectrum wa = dft2(g_d.re);
        const Spectrum wb = dft2(g_d.im);
        Grid g_grid(lh, lw);
        for (size_t i = 0; i < g_grid.size(); ++i) g_grid[i] = wa.re[i] + wb.im[i];

        // gather through the (folded) embedding, scatter through the tap
        // subsampling into the cross-correlation kernel q
        Grid g_q(f.q.height(), f.q.width());
        for (int r = 0; r < f.sub.height(); ++r)
            for (int c = 0; c < f.sub.width(); ++c) {
                const double g = g_grid.at(mod(r - f.sub.center_row, lh),
                                           mod(c - f.sub.center_col, lw));
                g_q.at(f.q.center_row + a * (r - f.sub.center_row),
                       f.q.center_col + a * (c - f.sub.center_col)) += g;
            }

        const Grid g_k_corr = valid_corr(g_q, ctx.k_bicub_flip.taps);
        for (size_t i = 0; i < g_k.size(); ++i) g_k[i] += g_k_corr[i];
    }

    // L1 regularizers (subgradient 0 at 0)
    for (size_t i = 0; i < g_k.size(); ++i)
        g_k[i] += state.hyper.lambda_cen * ctx.m_cen[i] * sign(f.k.taps[i]) +
                  state.hyper.lambda_sparse * sign(f.k.taps[i]);

    // Back through the factor composition k = ((k0*k1)*k2)*k3.
    std::array<Grid, 4> grads;
    grads[3] = valid_corr(g_k, f.k012.taps);
    const Grid g_k012 = valid_corr(g_k, state.factors[3].taps);
    grads[2] = valid_corr(g_k012, f.k01.taps);
    const Grid g_k01 = valid_corr(g_k012, state.factors[2].taps);
    grads[1] = valid_corr(g_k01, state.factors[0].taps);
    grads[0] = valid_corr(g_k01, state.factors[1].taps);
    (void)n_hr;
    return grads;
}

} // namespace

EstimationState make_initial_state(int alpha, const EstimationHyper& hyper,
                                   std::array<int, 4> sizes) {
    if (alpha < 1) throw std::invalid_argument("make_initial_state: alpha < 1");
    const Kernel kb = bicubic_kernel(alpha);
    if (kb.height() > sizes[3])
        throw std::invalid_argument(
            "make_initial_state: bicubic kernel does not fit the last factor");
    EstimationState state;
    state.hyper = hyper;
    for (int n = 0; n < 3; ++n) state.factors[n] = delta_kernel(sizes[n]);
    // Embed the bicubic taps centered in the last factor so the composition
    // equals k_bicub exactly at iteration 0.
    Kernel k3;
    k3.taps = Grid(sizes[3], sizes[3]);
    const int off = (sizes[3] - kb.height()) / 2;
    for (int r = 0; r < kb.height(); ++r)
        for (int c = 0; c < kb.width(); ++c)
            k3.taps.at(off + r, off + c) = kb.taps.at(r, c);
    k3.center_row = off + kb.center_row;
    k3.center_col = off + kb.center_col;
    state.factors[3] = k3;
    for (int n = 0; n < 4; ++n) {
        state.adam_m[n] = Grid(sizes[n], sizes[n]);
        state.adam_v[n] = Grid(sizes[n], sizes[n]);
    }
    return state;
}

Kernel compose_kernel(const EstimationState& state) {
    Kernel k = linear_convolve(state.factors[0], state.factors[1]);
    k = linear_convolve(k, state.factors[2]);
    return linear_convolve(k, state.factors[3]);
}

Grid centrality_mask(int h, int w, int cr, int cc, int alpha) {
    Grid m(h, w);
    const double denom = 32.0 * alpha * alpha;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const double dy = r - cr, dx = c - cc;
            m.at(r, c) = 1.0 - std::exp(-(dx * dx + dy * dy) / denom);
        }
    return m;
}

Grid centrality_mask(int size, int alpha) {
    return centrality_mask(size, size, size / 2, size / 2, alpha);
}

double huber(const Grid& residual, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("huber: delta <= 0");
    double sum = 0.0;
    for (size_t i = 0; i < residual.size(); ++i) {
        const double r = std::abs(residual[i]);
        sum += r <= delta ? 0.5 * r * r : delta * (r - 0.5 * delta);
    }
    return sum / residual.size();
}

EstimationContext make_context(const Image& y, int alpha,
                               const EstimationState& state) {
    EstimationContext ctx;
    ctx.y = to_luma(y).channels[0];
    ctx.alpha = alpha;
    ctx.y_spec = dft2(ctx.y);
    ctx.k_bicub = bicubic_kernel(alpha);
    ctx.k_bicub_flip = flip(ctx.k_bicub);
    ctx.f_numer = numerator_spectrum(alpha, ctx.y.height(), ctx.y.width());
    ctx.hr_h = alpha * ctx.y.height();
    ctx.hr_w = alpha * ctx.y.width();

    // Multiplier of the built-in resolver's spectral division.
    const double eps = state.hyper.filter_epsilon;
    ctx.resolver_mul = Spectrum(ctx.y.height(), ctx.y.width());
    for (size_t i = 0; i < ctx.resolver_mul.re.size(); ++i) {
        const double gr = ctx.f_numer.re[i], gi = ctx.f_numer.im[i];
        const double s = gr * gr + gi * gi + eps;
        ctx.resolver_mul.re[i] = gr / s;
        ctx.resolver_mul.im[i] = -gi / s;
    }

    const Kernel k = compose_kernel(state);
    ctx.m_cen = centrality_mask(k.height(), k.width(), k.center_row,
                                k.center_col, alpha);
    return ctx;
}

LossParts objective(const EstimationState& state, const EstimationContext& ctx) {
    Forward f;
    forward_pass(state, ctx, f);
    return f.loss;
}

GradientResult gradient(const EstimationState& state, const EstimationContext& ctx,
                        bool correction_path, bool downsample_path) {
    Forward f;
    forward_pass(state, ctx, f);
    GradientResult res;
    res.loss = f.loss;
    res.factor_grads =
        backward_pass(state, ctx, f, correction_path, downsample_path);
    for (const Grid& g : res.factor_grads)
        for (size_t i = 0; i < g.size(); ++i)
            if (!std::isfinite(g[i]))
                throw NumericError("estimation gradient is non-finite");
    return res;
}

void adam_step(EstimationState& state, const std::array<Grid, 4>& grads) {
    const EstimationHyper& hp = state.hyper;
    const int t = ++state.iteration;
    const double bc1 = 1.0 - std::pow(hp.beta1, t);
    const double bc2 = 1.0 - std::pow(hp.beta2, t);
    for (int n = 0; n < 4; ++n) {
        Grid& m = state.adam_m[n];
        Grid& v = state.adam_v[n];
        Grid& theta = state.factors[n].taps;
        const Grid& g = grads[n];
        if (!g.same_shape(theta))
            throw std::invalid_argument("adam_step: gradient shape mismatch");
        for (size_t i = 0; i < theta.size(); ++i) {
            m[i] = hp.beta1 * m[i] + (1.0 - hp.beta1) * g[i];
            v[i] = hp.beta2 * v[i] + (1.0 - hp.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            theta[i] -= hp.learning_rate * mhat / (std::sqrt(vhat) + hp.adam_epsilon);
        }
    }
}

EstimationResult estimate_correction(const Image& y, int alpha,
                                     const EstimationHyper& hyper,
                                     std::ostream* report) {
    const Image luma = to_luma(y);
    if (luma.height() < 32 || luma.width() < 32)
        throw std::invalid_argument(
            "estimate_correction: LR image too small (needs >= 32 pixels per side)");

    EstimationState state = make_initial_state(alpha, hyper);
    const EstimationContext ctx = make_context(luma, alpha, state);

    if (report) {
        *report << "# estimate alpha=" << alpha << " eps=" << hyper.filter_epsilon
                << " lr=" << hyper.learning_rate << " iters=" << hyper.iterations
                << " huber_delta=" << hyper.huber_delta
                << " lambda_cen=" << hyper.lambda_cen
                << " lambda_sparse=" << hyper.lambda_sparse << "\n";
        *report << "# iter loss fidelity l1_cen l1_sparse\n";
    }

    EstimationResult result;
    Spectrum last_h;
    for (int i = 1; i <= hyper.iterations; ++i) {
        Forward f;
        forward_pass(state, ctx, f);
        last_h = f.h_spec;
        const auto grads = backward_pass(state, ctx, f, true, true);
        if (!std::isfinite(f.loss.total))
            throw NumericError("estimation diverged at iteration " +
                               std::to_string(i));
        result.trace.push_back(f.loss);
        result.kernel_mass.push_back(f.k.taps.sum());
        if (report)
            *report << i << " " << f.loss.total << " " << f.loss.fidelity << " "
                    << f.loss.l1_cen << " " << f.loss.l1_sparse << "\n";
        adam_step(state, grads);
    }

    result.filter.spectrum = last_h;
    result.filter.grid_h = ctx.y.height();
    result.filter.grid_w = ctx.y.width();
    result.filter.epsilon = hyper.filter_epsilon;
    result.filter.variant = CorrectionFilter::Variant::regularized_h;

    result.kernel = compose_kernel(state);
    result.kernel_normalized = result.kernel;
    const double mass = result.kernel.taps.sum();
    if (mass != 0.0)
        for (size_t i = 0; i < result.kernel_normalized.taps.size(); ++i)
            result.kernel_normalized.taps[i] /= mass;
    return result;
}

} // namespace corrfilt
