#pragma once

#include <cstdint>

namespace morphgen {

// Counter-based noise source. A sample is a pure function of
// (seed, stream, step, component, cell), so the sequence is identical no
// matter how cells are scheduled across workers.
struct NoisePlan {
    uint64_t seed = 0;

    double normal(uint64_t stream, uint64_t step, uint64_t component,
                  uint64_t cell) const;
    double uniform01(uint64_t stream, uint64_t step, uint64_t component,
                     uint64_t cell) const;
};

uint64_t hash_mix(uint64_t x);

// Inverse standard normal CDF (Acklam's rational approximation, |rel err|
// below 1.2e-9), monotone on (0,1).
double inverse_normal_cdf(double p);

}  // namespace morphgen
