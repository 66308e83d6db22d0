// AVX2+FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; nothing here may be called unless avx2_ops() returned a
// non-null table (runtime CPU check in kernels_dispatch.cpp).

#include "pct/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define PCT_HAVE_AVX2_TU 1
#else
#define PCT_HAVE_AVX2_TU 0
#endif

#if PCT_HAVE_AVX2_TU

#include <immintrin.h>

#include <cmath>

namespace pct::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// Vector exp, Cephes rational approximation (~1-2 ulp). Arguments are clamped
// to [-708, 708], which keeps 2^n representable as a normal double.
inline __m256d exp4(__m256d x) {
    x = _mm256_min_pd(x, _mm256_set1_pd(708.0));
    x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d n =
        _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);

    // r = x - n*ln2, ln2 split for extra precision
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);
    const __m256d rr = _mm256_mul_pd(r, r);

    __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
    p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300e-2));
    p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910e-1));
    p = _mm256_mul_pd(p, r);

    __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
    q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192e-3));
    q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766e-1));
    q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000005e0));

    __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

    // scale by 2^n via the exponent field
    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    n64 = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(e, _mm256_castsi256_pd(n64));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sq_dist_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void sigmoid_avx2(const double* z, double* out, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d signmask = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d zi = _mm256_loadu_pd(z + i);
        const __m256d az = _mm256_andnot_pd(signmask, zi);
        const __m256d e = exp4(_mm256_sub_pd(zero, az));
        const __m256d num = _mm256_blendv_pd(e, one, _mm256_cmp_pd(zi, zero, _CMP_GE_OQ));
        _mm256_storeu_pd(out + i, _mm256_div_pd(num, _mm256_add_pd(one, e)));
    }
    for (; i < n; ++i) {
        const double e = std::exp(-std::fabs(z[i]));
        const double num = z[i] >= 0.0 ? 1.0 : e;
        out[i] = num / (1.0 + e);
    }
}

void sigmoid_grad_avx2(const double* s, double* out, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d si = _mm256_loadu_pd(s + i);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(si, _mm256_sub_pd(one, si)));
    }
    for (; i < n; ++i) out[i] = s[i] * (1.0 - s[i]);
}

}  // namespace

const Ops* avx2_table() {
    static const Ops ops{
        "avx2",   dot_avx2,  sq_dist_avx2, sum_avx2,
        axpy_avx2, sigmoid_avx2, sigmoid_grad_avx2,
    };
    return &ops;
}

}  // namespace pct::kernels

#else

namespace pct::kernels {
const Ops* avx2_table() { return nullptr; }
}  // namespace pct::kernels

#endif
