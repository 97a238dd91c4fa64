#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "corrfilt/image.hpp"

namespace corrfilt {

namespace {

// Reads the next header token, skipping whitespace and '#' comment lines.
std::string next_token(std::istream& in, const std::string& path) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) continue;
        break;
    }
    if (c == EOF)
        throw IoError("malformed PNM header (unexpected end of file): " + path);
    tok.push_back(static_cast<char>(c));
    while ((c = in.get()) != EOF && !std::isspace(c) && c != '#')
        tok.push_back(static_cast<char>(c));
    if (c == '#') {
        while ((c = in.get()) != EOF && c != '\n') {}
    }
    return tok;
}

int parse_positive(const std::string& tok, const std::string& what,
                   const std::string& path) {
    try {
        size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError("malformed PNM header (" + what + " = '" + tok + "'): " + path);
    }
}

} // namespace

Image load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image file: " + path);

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || (m1 != '5' && m1 != '6')) {
        if (m0 == 'P')
            throw IoError(std::string("unsupported PNM magic number P") + m1 + ": " + path);
        throw IoError("not a binary PGM/PPM file: " + path);
    }
    const int nch = (m1 == '5') ? 1 : 3;

    int width = parse_positive(next_token(in, path), "width", path);
    int height = parse_positive(next_token(in, path), "height", path);
    int maxval = parse_positive(next_token(in, path), "maxval", path);
    if (maxval > 65535)
        throw IoError("malformed PNM header (maxval > 65535): " + path);
    // Single whitespace byte separates header from raster; next_token already
    // consumed it while terminating the maxval token.

    const int bytes_per_sample = maxval > 255 ? 2 : 1;
    const size_t nsamples = static_cast<size_t>(width) * height * nch;
    std::vector<uint8_t> raw(nsamples * bytes_per_sample);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
        throw IoError("truncated PNM raster: " + path);

    Image img(height, width, nch);
    const double inv = 1.0 / maxval;
    size_t p = 0;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            for (int ch = 0; ch < nch; ++ch) {
                unsigned v;
                if (bytes_per_sample == 1) {
                    v = raw[p++];
                } else {
                    v = (static_cast<unsigned>(raw[p]) << 8) | raw[p + 1];
                    p += 2;
                }
                img.channels[ch].at(r, c) = v * inv;
            }
        }
    }
    return img;
}

void save_image(const Image& img, const std::string& path) {
    const int nch = img.num_channels();
    if (nch != 1 && nch != 3)
        throw IoError("save_image: channel count must be 1 or 3, got " +
                      std::to_string(nch));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);

    out << (nch == 1 ? "P5" : "P6") << "\n"
        << img.width() << " " << img.height() << "\n255\n";
    std::vector<uint8_t> raw;
    raw.reserve(static_cast<size_t>(img.width()) * img.height() * nch);
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            for (int ch = 0; ch < nch; ++ch) {
                double v = img.channels[ch].at(r, c);
                v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
                raw.push_back(static_cast<uint8_t>(std::lround(v * 255.0)));
            }
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed: " + path);
}

Image to_luma(const Image& img) {
    const int nch = img.num_channels();
    if (nch == 1) return img;
    if (nch != 3)
        throw std::invalid_argument("to_luma: expected 1 or 3 channels");
    Image out(img.height(), img.width(), 1);
    const Grid& r = img.channels[0];
    const Grid& g = img.channels[1];
    const Grid& b = img.channels[2];
    Grid& y = out.channels[0];
    for (size_t i = 0; i < y.size(); ++i)
        y[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    return out;
}

} // namespace corrfilt
