#include "morphgen/stencil.hpp"

#include "morphgen/parallel.hpp"

namespace morphgen {

void gradient_into(const ScalarGrid& f, double dx, ScalarGrid& gx, ScalarGrid& gy,
                   int threads) {
    const int nx = f.nx, ny = f.ny;
    const double inv2 = 1.0 / (2.0 * dx);
    const double inv1 = 1.0 / dx;
    parallel_for(ny, threads, [&](size_t jb, size_t je) {
        for (size_t j = jb; j < je; j++) {
            const double* row = &f.v[j * nx];
            double* ox = &gx.v[j * nx];
            for (int i = 1; i < nx - 1; i++) ox[i] = (row[i + 1] - row[i - 1]) * inv2;
            ox[0] = (row[1] - row[0]) * inv1;
            ox[nx - 1] = (row[nx - 1] - row[nx - 2]) * inv1;

            const double* up = j + 1 < (size_t)ny ? &f.v[(j + 1) * nx] : nullptr;
            const double* dn = j > 0 ? &f.v[(j - 1) * nx] : nullptr;
            double* oy = &gy.v[j * nx];
            if (up && dn) {
                for (int i = 0; i < nx; i++) oy[i] = (up[i] - dn[i]) * inv2;
            } else if (up) {
                for (int i = 0; i < nx; i++) oy[i] = (up[i] - row[i]) * inv1;
            } else if (dn) {
                for (int i = 0; i < nx; i++) oy[i] = (row[i] - dn[i]) * inv1;
            } else {
                for (int i = 0; i < nx; i++) oy[i] = 0.0;
            }
        }
    });
}

VectorGrid gradient(const ScalarGrid& f, double dx) {
    VectorGrid g(f.nx, f.ny);
    gradient_into(f, dx, g.x, g.y);
    return g;
}

void laplacian_into(const ScalarGrid& f, double dx, ScalarGrid& out, int threads) {
    const int nx = f.nx, ny = f.ny;
    const double inv = 1.0 / (dx * dx);
    parallel_for(ny, threads, [&](size_t jb, size_t je) {
        for (size_t j = jb; j < je; j++) {
            const double* row = &f.v[j * nx];
            const double* up = j + 1 < (size_t)ny ? &f.v[(j + 1) * nx] : row;
            const double* dn = j > 0 ? &f.v[(j - 1) * nx] : row;
            double* o = &out.v[j * nx];
            for (int i = 0; i < nx; i++) {
                double xm = i > 0 ? row[i - 1] : row[i];
                double xp = i < nx - 1 ? row[i + 1] : row[i];
                o[i] = (xm + xp + up[i] + dn[i] - 4.0 * row[i]) * inv;
            }
        }
    });
}

ScalarGrid laplacian(const ScalarGrid& f, double dx) {
    ScalarGrid out(f.nx, f.ny);
    laplacian_into(f, dx, out);
    return out;
}

void divergence_into(const ScalarGrid& fx, const ScalarGrid& fy, double dx,
                     ScalarGrid& out, int threads) {
    const int nx = fx.nx, ny = fx.ny;
    const double inv2 = 1.0 / (2.0 * dx);
    parallel_for(ny, threads, [&](size_t jb, size_t je) {
        const double inv1 = 1.0 / dx;
        for (size_t j = jb; j < je; j++) {
            const double* rx = &fx.v[j * nx];
            double* o = &out.v[j * nx];
            for (int i = 1; i < nx - 1; i++) o[i] = (rx[i + 1] - rx[i - 1]) * inv2;
            o[0] = (rx[1] - rx[0]) * inv1;
            o[nx - 1] = (rx[nx - 1] - rx[nx - 2]) * inv1;

            const double* up = j + 1 < (size_t)ny ? &fy.v[(j + 1) * nx] : nullptr;
            const double* dn = j > 0 ? &fy.v[(j - 1) * nx] : nullptr;
            const double* ry = &fy.v[j * nx];
            if (up && dn) {
                for (int i = 0; i < nx; i++) o[i] += (up[i] - dn[i]) * inv2;
            } else if (up) {
                for (int i = 0; i < nx; i++) o[i] += (up[i] - ry[i]) * inv1;
            } else if (dn) {
                for (int i = 0; i < nx; i++) o[i] += (ry[i] - dn[i]) * inv1;
            }
        }
    });
}

ScalarGrid divergence(const VectorGrid& v, double dx) {
    ScalarGrid out(v.x.nx, v.x.ny);
    divergence_into(v.x, v.y, dx, out);
    return out;
}

}  // namespace morphgen
