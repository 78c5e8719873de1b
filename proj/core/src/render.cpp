#include "morphgen/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "morphgen/diag.hpp"

namespace morphgen {

namespace {

const Rgb kWhite{255, 255, 255};
const Rgb kBlack{0, 0, 0};

// 4x6 glyphs for the limits legend, one bit per pixel, rows top-down.
struct Glyph {
    char ch;
    uint8_t rows[6];
};
const Glyph kFont[] = {
    {'0', {0b0110, 0b1001, 0b1001, 0b1001, 0b1001, 0b0110}},
    {'1', {0b0010, 0b0110, 0b0010, 0b0010, 0b0010, 0b0111}},
    {'2', {0b0110, 0b1001, 0b0001, 0b0110, 0b1000, 0b1111}},
    {'3', {0b1110, 0b0001, 0b0110, 0b0001, 0b0001, 0b1110}},
    {'4', {0b1001, 0b1001, 0b1111, 0b0001, 0b0001, 0b0001}},
    {'5', {0b1111, 0b1000, 0b1110, 0b0001, 0b0001, 0b1110}},
    {'6', {0b0110, 0b1000, 0b1110, 0b1001, 0b1001, 0b0110}},
    {'7', {0b1111, 0b0001, 0b0010, 0b0010, 0b0100, 0b0100}},
    {'8', {0b0110, 0b1001, 0b0110, 0b1001, 0b1001, 0b0110}},
    {'9', {0b0110, 0b1001, 0b1001, 0b0111, 0b0001, 0b0110}},
    {'.', {0b0000, 0b0000, 0b0000, 0b0000, 0b0000, 0b0100}},
    {'-', {0b0000, 0b0000, 0b1111, 0b0000, 0b0000, 0b0000}},
    {'+', {0b0000, 0b0010, 0b0111, 0b0010, 0b0000, 0b0000}},
    {'e', {0b0000, 0b0110, 0b1001, 0b1111, 0b1000, 0b0111}},
};

void draw_text(FrameImage& img, int x, int y, const std::string& text, Rgb c) {
    for (char ch : text) {
        for (const Glyph& g : kFont) {
            if (g.ch != ch) continue;
            for (int r = 0; r < 6; r++)
                for (int b = 0; b < 4; b++)
                    if (g.rows[r] & (1 << (3 - b))) img.set(x + b, y + r, c);
            break;
        }
        x += 5;
    }
}

std::string short_number(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void draw_line(FrameImage& img, double x0, double y0, double x1, double y1, Rgb c) {
    int steps = (int)std::ceil(std::max(std::fabs(x1 - x0), std::fabs(y1 - y0))) + 1;
    for (int s = 0; s <= steps; s++) {
        double t = steps == 0 ? 0 : (double)s / steps;
        img.set((int)std::lround(x0 + (x1 - x0) * t), (int)std::lround(y0 + (y1 - y0) * t),
                c);
    }
}

constexpr int kLegendW = 48;

void draw_legend(FrameImage& img, int nx, int ny, Limits lim) {
    for (int y = 0; y < ny; y++) {
        double v = ny <= 1 ? 1.0 : 1.0 - (double)y / (ny - 1);
        Rgb c = colormap_lookup(v);
        for (int x = nx + 2; x < nx + 10; x++) img.set(x, y, c);
    }
    draw_text(img, nx + 12, 1, short_number(lim.hi), kBlack);
    draw_text(img, nx + 12, ny - 7, short_number(lim.lo), kBlack);
}

FrameImage blank(int w, int h) {
    FrameImage img;
    img.w = w;
    img.h = h;
    img.rgb.assign((size_t)w * h * 3, 255);
    return img;
}

}  // namespace

Limits auto_limits(const ScalarGrid& f) {
    double lo = f.v.empty() ? 0 : f[0], hi = lo;
    for (double x : f.v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(lo < hi)) hi = lo + 1;  // constant field still renders
    return {lo, hi};
}

FrameImage render_colors(const ScalarGrid& f, Limits lim) {
    if (!(lim.lo < lim.hi)) throw UsageError("DegenerateLimits: lo must be below hi");
    FrameImage img = blank(f.nx + kLegendW, f.ny);
    double span = lim.hi - lim.lo;
    for (int j = 0; j < f.ny; j++) {
        int y = f.ny - 1 - j;
        for (int i = 0; i < f.nx; i++)
            img.set(i, y, colormap_lookup((f.at(i, j) - lim.lo) / span));
    }
    draw_legend(img, f.nx, f.ny, lim);
    return img;
}

FrameImage render_contours(const ScalarGrid& f, Limits lim, int levels) {
    if (!(lim.lo < lim.hi)) throw UsageError("DegenerateLimits: lo must be below hi");
    if (levels < 1) levels = 1;
    FrameImage img = blank(f.nx + kLegendW, f.ny);
    auto py = [&](double j) { return (double)f.ny - 1 - j; };

    for (int l = 1; l <= levels; l++) {
        double L = lim.lo + (lim.hi - lim.lo) * l / (levels + 1);
        for (int j = 0; j + 1 < f.ny; j++) {
            for (int i = 0; i + 1 < f.nx; i++) {
                double v00 = f.at(i, j), v10 = f.at(i + 1, j);
                double v11 = f.at(i + 1, j + 1), v01 = f.at(i, j + 1);
                int c = (v00 > L ? 1 : 0) | (v10 > L ? 2 : 0) | (v11 > L ? 4 : 0) |
                        (v01 > L ? 8 : 0);
                if (c == 0 || c == 15) continue;
                auto interp = [L](double a, double b) {
                    double d = b - a;
                    return d == 0 ? 0.5 : (L - a) / d;
                };
                // edge midpoints: bottom, right, top, left
                double bx = i + interp(v00, v10), by = j;
                double rx = i + 1, ry = j + interp(v10, v11);
                double tx = i + interp(v01, v11), ty = j + 1;
                double lx = i, ly = j + interp(v00, v01);
                auto seg = [&](double x0, double y0, double x1, double y1) {
                    draw_line(img, x0, py(y0), x1, py(y1), kBlack);
                };
                switch (c) {
                    case 1: case 14: seg(bx, by, lx, ly); break;
                    case 2: case 13: seg(bx, by, rx, ry); break;
                    case 3: case 12: seg(lx, ly, rx, ry); break;
                    case 4: case 11: seg(rx, ry, tx, ty); break;
                    case 5: seg(bx, by, lx, ly); seg(rx, ry, tx, ty); break;
                    case 6: case 9: seg(bx, by, tx, ty); break;
                    case 7: case 8: seg(lx, ly, tx, ty); break;
                    case 10: seg(bx, by, rx, ry); seg(lx, ly, tx, ty); break;
                }
            }
        }
    }
    draw_legend(img, f.nx, f.ny, lim);
    return img;
}

FrameImage render_quivers(const VectorGrid& v, double dx, double pitch) {
    const int nx = v.x.nx, ny = v.x.ny;
    if (pitch <= 0) pitch = std::max(nx, ny) * dx / 16.0;
    FrameImage img = blank(nx, ny);
    double vmax = 0;
    for (size_t k = 0; k < v.x.size(); k++)
        vmax = std::max(vmax, std::hypot(v.x[k], v.y[k]));

    double pitch_px = pitch / dx;
    double width = nx * dx, height = ny * dx;
    for (double wy = pitch / 2; wy < height; wy += pitch) {
        for (double wx = pitch / 2; wx < width; wx += pitch) {
            int i = std::min(nx - 1, (int)(wx / dx));
            int j = std::min(ny - 1, (int)(wy / dx));
            double ux = v.x.at(i, j), uy = v.y.at(i, j);
            double mag = std::hypot(ux, uy);
            double px = wx / dx, pyv = ny - 1 - wy / dx;
            if (vmax == 0 || mag == 0) {
                img.set((int)px, (int)pyv, kBlack);
                continue;
            }
            double len = std::min(1.0, mag / vmax) * pitch_px;
            double ex = px + ux / mag * len;
            double ey = pyv - uy / mag * len;  // image y is flipped
            draw_line(img, px, pyv, ex, ey, kBlack);
            // arrowhead
            double hx = -ux / mag, hy = uy / mag;
            double wxn = -hy, wyn = hx;
            double hl = std::max(2.0, len * 0.25);
            draw_line(img, ex, ey, ex + (hx + 0.5 * wxn) * hl, ey + (hy + 0.5 * wyn) * hl,
                      kBlack);
            draw_line(img, ex, ey, ex + (hx - 0.5 * wxn) * hl, ey + (hy - 0.5 * wyn) * hl,
                      kBlack);
        }
    }
    return img;
}

}  // namespace morphgen
