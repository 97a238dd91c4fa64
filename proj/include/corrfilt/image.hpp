#ifndef CORRFILT_IMAGE_HPP
#define CORRFILT_IMAGE_HPP

#include <string>
#include <vector>

#include "corrfilt/grid.hpp"

namespace corrfilt {

/// Planar multi-channel image. Pixel values live in [0,1] as doubles;
/// clamping and quantization happen only when saving.
struct Image {
    std::vector<Grid> channels;

    Image() = default;
    Image(int height, int width, int nchannels, double fill = 0.0) {
        channels.assign(nchannels, Grid(height, width, fill));
    }

    int height() const { return channels.empty() ? 0 : channels[0].height(); }
    int width() const { return channels.empty() ? 0 : channels[0].width(); }
    int num_channels() const { return static_cast<int>(channels.size()); }
};

/// BT.601 luma (0.299 R + 0.587 G + 0.114 B). 1-channel input passes through.
Image to_luma(const Image& img);

// Binary PNM (PGM/PPM) I/O. Loading scales to [0,1] by the file's maxval;
// saving clamps, quantizes with round(v*255) and writes maxval 255.
Image load_image(const std::string& path);
void save_image(const Image& img, const std::string& path);

} // namespace corrfilt

#endif
