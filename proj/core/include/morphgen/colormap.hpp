#pragma once

#include <cstdint>

namespace morphgen {

struct Rgb {
    uint8_t r, g, b;
};

extern const Rgb kColormap256[256];

// v in [0,1] (clamped) to a colormap entry.
Rgb colormap_lookup(double v);

}  // namespace morphgen
