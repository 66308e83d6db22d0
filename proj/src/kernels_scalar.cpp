#include "pct/kernels.hpp"

#include <cmath>

namespace pct::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sq_dist_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double sum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void sigmoid_scalar(const double* z, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        // exp of a non-positive argument only: no overflow for any finite z.
        const double e = std::exp(-std::fabs(z[i]));
        const double num = z[i] >= 0.0 ? 1.0 : e;
        out[i] = num / (1.0 + e);
    }
}

void sigmoid_grad_scalar(const double* s, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = s[i] * (1.0 - s[i]);
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{
        "scalar",   dot_scalar,     sq_dist_scalar,
        sum_scalar, axpy_scalar,    sigmoid_scalar,
        sigmoid_grad_scalar,
    };
    return ops;
}

}  // namespace pct::kernels
