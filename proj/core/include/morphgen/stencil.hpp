#pragma once

#include "morphgen/grid.hpp"

namespace morphgen {

// Central differences in the interior, one-sided at the boundary.
void gradient_into(const ScalarGrid& f, double dx, ScalarGrid& gx, ScalarGrid& gy,
                   int threads = 1);
VectorGrid gradient(const ScalarGrid& f, double dx);

// 5-point stencil with zero-flux (mirror ghost) boundaries.
void laplacian_into(const ScalarGrid& f, double dx, ScalarGrid& out, int threads = 1);
ScalarGrid laplacian(const ScalarGrid& f, double dx);

// Central differences per component at interior cells, one-sided at the
// boundary (same handling as gradient).
void divergence_into(const ScalarGrid& fx, const ScalarGrid& fy, double dx,
                     ScalarGrid& out, int threads = 1);
ScalarGrid divergence(const VectorGrid& v, double dx);

}  // namespace morphgen
