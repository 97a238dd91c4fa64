#ifndef CORRFILT_ESTIMATE_HPP
#define CORRFILT_ESTIMATE_HPP

#include <array>
#include <iosfwd>
#include <vector>

#include "corrfilt/correction.hpp"
#include "corrfilt/image.hpp"
#include "corrfilt/operators.hpp"

namespace corrfilt {

struct EstimationHyper {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int iterations = 250;
    double huber_delta = 1.0;
    double lambda_cen = 1.0;
    double lambda_sparse = 1.0;
    double filter_epsilon = 1e-14;
};

/// Four-factor parameterization of the latent kernel plus Adam state.
struct EstimationState {
    std::array<Kernel, 4> factors;
    std::array<Grid, 4> adam_m, adam_v;
    int iteration = 0;
    EstimationHyper hyper;
};

/// Deltas for the first three factors, the bicubic kernel embedded in the
/// last, so the composition equals k_bicub exactly at iteration 0.
EstimationState make_initial_state(int alpha, const EstimationHyper& hyper = {},
                                   std::array<int, 4> sizes = {33, 33, 33, 32});

/// k = k0 * k1 * k2 * k3 (linear convolution chain).
Kernel compose_kernel(const EstimationState& state);

/// Radial mask 1 - exp(-(x^2+y^2)/(32 alpha^2)); x,y are tap offsets from
/// the center (cr, cc). Zero at the center, < 1 everywhere.
Grid centrality_mask(int h, int w, int cr, int cc, int alpha);
Grid centrality_mask(int size, int alpha);

/// Mean over entries of the Huber penalty: r^2/2 below delta, delta(|r|-delta/2) above.
double huber(const Grid& residual, double delta);

struct LossParts {
    double total = 0.0;
    double fidelity = 0.0;
    double l1_cen = 0.0;
    double l1_sparse = 0.0;
};

/// Fixed per-problem data: the LR luma image, its spectrum and the
/// kernel-independent spectra of the loss pipeline.
struct EstimationContext {
    Grid y;
    int alpha = 0;
    Spectrum y_spec;      // dft2(y)
    Kernel k_bicub;
    Kernel k_bicub_flip;
    Spectrum f_numer;     // bicubic autocorrelation spectrum on the LR grid
    Spectrum resolver_mul; // conj(G)/(|G|^2 + eps) multiplier of the built-in f
    Grid m_cen;           // sized to the composed kernel
    int hr_h = 0, hr_w = 0;
};

EstimationContext make_context(const Image& y, int alpha,
                               const EstimationState& state);

/// Huber fidelity of the re-downsampled resolve plus masked and plain L1
/// on the composed kernel.
LossParts objective(const EstimationState& state, const EstimationContext& ctx);

struct GradientResult {
    std::array<Grid, 4> factor_grads;
    LossParts loss;
};

/// Exact reverse-mode gradient of the objective w.r.t. every factor tap.
/// The two kernel-dependent paths (correction filter and downsampler) can be
/// ablated independently for diagnostics.
GradientResult gradient(const EstimationState& state, const EstimationContext& ctx,
                        bool correction_path = true, bool downsample_path = true);

/// Standard Adam with bias correction; advances state.iteration.
void adam_step(EstimationState& state, const std::array<Grid, 4>& grads);

struct EstimationResult {
    Kernel kernel;            // final composed kernel
    Kernel kernel_normalized; // unit-sum copy
    CorrectionFilter filter;  // h from the last forward pass
    std::vector<LossParts> trace;
    std::vector<double> kernel_mass; // composed-kernel tap sum per iteration
};

/// Full estimation loop: compose, build h, resolve, re-downsample, loss,
/// Adam; writes one "iter loss fidelity l1_cen l1_sparse" line per iteration
/// to `report` when given.
EstimationResult estimate_correction(const Image& y, int alpha,
                                     const EstimationHyper& hyper = {},
                                     std::ostream* report = nullptr);

} // namespace corrfilt

#endif
