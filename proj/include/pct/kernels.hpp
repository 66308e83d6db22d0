#pragma once

#include <cstddef>

namespace pct::kernels {

// Inner-loop primitives behind the metric, ranking and loss modules. Each
// operation has a scalar reference implementation and may have SIMD variants;
// the active table is resolved once per process. SIMD variants are
// equivalence-tested against the scalar reference (tests/test_kernels.cpp).
struct Ops {
    const char* name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i (a[i] - b[i])^2
    double (*sq_dist)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // out[i] = 1 / (1 + exp(-z[i])), overflow-safe for any finite z
    void (*sigmoid)(const double* z, double* out, std::size_t n);
    // out[i] = s[i] * (1 - s[i]) where s holds sigmoid values
    void (*sigmoid_grad)(const double* s, double* out, std::size_t n);
};

const Ops& scalar_ops();

/// AVX2+FMA variant; nullptr when the CPU (or build) lacks support.
const Ops* avx2_ops();

/// Resolved once: best supported variant, overridable with PCT_KERNELS=scalar|avx2.
const Ops& active();

}  // namespace pct::kernels
