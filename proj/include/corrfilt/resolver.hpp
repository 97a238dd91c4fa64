#ifndef CORRFILT_RESOLVER_HPP
#define CORRFILT_RESOLVER_HPP

#include <string>

#include "corrfilt/correction.hpp"
#include "corrfilt/image.hpp"

namespace corrfilt {

/// The super-resolver f(.): either the built-in linear reconstructor or an
/// external command run on PNM files.
struct ResolverSpec {
    enum class Kind { builtin_linear, external };

    Kind kind = Kind::builtin_linear;
    // Must contain {in}, {out} and {scale} placeholders (external only).
    std::string command_template;
    double timeout_seconds = 300.0;
    // epsilon for the built-in pseudo-inverse division
    double builtin_epsilon = 0.0;
};

/// x_hat = f(h * y): applies the correction filter, then dispatches to the
/// resolver. Output dims are verified to be alpha x input dims.
Image super_resolve(const Image& y, const CorrectionFilter& h, int alpha,
                    const ResolverSpec& spec);

/// Runs the external command on an already-corrected LR image. Writes a temp
/// PNM, substitutes {in}/{out}/{scale}, loads the result, removes temp files.
/// Temp directory comes from CORRFILT_TMP when set.
Image resolve_external(const Image& y_corrected, int alpha,
                       const ResolverSpec& spec);

} // namespace corrfilt

#endif
