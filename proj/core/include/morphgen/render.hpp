#pragma once

#include <string>

#include "morphgen/colormap.hpp"
#include "morphgen/grid.hpp"

namespace morphgen {

// Pixel (0,0) maps to (xlo, yhi): the y axis points up.
struct FrameImage {
    int w = 0, h = 0;
    std::vector<uint8_t> rgb;  // 3 bytes per pixel, row-major from the top

    void set(int x, int y, Rgb c) {
        if (x < 0 || y < 0 || x >= w || y >= h) return;
        size_t k = 3 * ((size_t)y * w + x);
        rgb[k] = c.r;
        rgb[k + 1] = c.g;
        rgb[k + 2] = c.b;
    }
};

struct Limits {
    double lo = 0, hi = 1;
};

// Default limits: the field's min/max for this frame.
Limits auto_limits(const ScalarGrid& f);

FrameImage render_colors(const ScalarGrid& f, Limits limits);
FrameImage render_contours(const ScalarGrid& f, Limits limits, int levels = 10);
// pitch is in world units; dx converts grid cells to world lengths
FrameImage render_quivers(const VectorGrid& v, double dx, double pitch);

// Deterministic PNG encoding (fixed zlib level, no ancillary chunks).
std::vector<uint8_t> png_bytes(const FrameImage& img);
void write_png(const FrameImage& img, const std::string& path);

}  // namespace morphgen
