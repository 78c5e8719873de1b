#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace morphgen {

// Uniform square-cell mesh. Cell (i, j) has its center at
// (xlo + (i+0.5)dx, ylo + (j+0.5)dx). Storage is row-major with y major:
// index = j*nx + i.
struct Grid2D {
    int nx = 0, ny = 0;
    double dx = 1.0;
    double xlo = 0.0, ylo = 0.0;

    size_t cells() const { return (size_t)nx * ny; }
    double cx(int i) const { return xlo + (i + 0.5) * dx; }
    double cy(int j) const { return ylo + (j + 0.5) * dx; }
    double width() const { return nx * dx; }
    double height() const { return ny * dx; }
};

struct ScalarGrid {
    int nx = 0, ny = 0;
    std::vector<double> v;

    ScalarGrid() = default;
    ScalarGrid(int nx_, int ny_, double init = 0.0)
        : nx(nx_), ny(ny_), v((size_t)nx_ * ny_, init) {}

    double& at(int i, int j) { return v[(size_t)j * nx + i]; }
    double at(int i, int j) const { return v[(size_t)j * nx + i]; }
    double& operator[](size_t k) { return v[k]; }
    double operator[](size_t k) const { return v[k]; }
    size_t size() const { return v.size(); }
    void fill(double x) { std::fill(v.begin(), v.end(), x); }
};

struct VectorGrid {
    ScalarGrid x, y;

    VectorGrid() = default;
    VectorGrid(int nx, int ny, double ix = 0.0, double iy = 0.0)
        : x(nx, ny, ix), y(nx, ny, iy) {}
};

}  // namespace morphgen
