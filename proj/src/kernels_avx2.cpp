#include "fwm/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace fwm::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double r = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

double sum_(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double r = hsum(acc);
    for (; i < n; ++i) r += a[i];
    return r;
}

double sumsq_(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(a + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double r = hsum(acc);
    for (; i < n; ++i) r += a[i] * a[i];
    return r;
}

void axpy_(double* y, double a, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void caxpy_(double* yre, double* yim, double are, double aim,
            const double* xre, const double* xim, std::size_t n) {
    const __m256d var = _mm256_set1_pd(are);
    const __m256d vai = _mm256_set1_pd(aim);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xr = _mm256_loadu_pd(xre + i);
        __m256d xi = _mm256_loadu_pd(xim + i);
        __m256d yr = _mm256_loadu_pd(yre + i);
        __m256d yi = _mm256_loadu_pd(yim + i);
        yr = _mm256_fmadd_pd(var, xr, yr);
        yr = _mm256_fnmadd_pd(vai, xi, yr);
        yi = _mm256_fmadd_pd(var, xi, yi);
        yi = _mm256_fmadd_pd(vai, xr, yi);
        _mm256_storeu_pd(yre + i, yr);
        _mm256_storeu_pd(yim + i, yi);
    }
    for (; i < n; ++i) {
        const double xr = xre[i], xi = xim[i];
        yre[i] += are * xr - aim * xi;
        yim[i] += are * xi + aim * xr;
    }
}

void cdotc_(const double* are, const double* aim, const double* bre,
            const double* bim, std::size_t n, double* out_re, double* out_im) {
    __m256d accr = _mm256_setzero_pd();
    __m256d acci = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ar = _mm256_loadu_pd(are + i);
        __m256d ai = _mm256_loadu_pd(aim + i);
        __m256d br = _mm256_loadu_pd(bre + i);
        __m256d bi = _mm256_loadu_pd(bim + i);
        accr = _mm256_fmadd_pd(ar, br, accr);
        accr = _mm256_fmadd_pd(ai, bi, accr);
        acci = _mm256_fmadd_pd(ar, bi, acci);
        acci = _mm256_fnmadd_pd(ai, br, acci);
    }
    double rr = hsum(accr), ri = hsum(acci);
    for (; i < n; ++i) {
        rr += are[i] * bre[i] + aim[i] * bim[i];
        ri += are[i] * bim[i] - aim[i] * bre[i];
    }
    *out_re = rr;
    *out_im = ri;
}

void cdotu_(const double* are, const double* aim, const double* bre,
            const double* bim, std::size_t n, double* out_re, double* out_im) {
    __m256d accr = _mm256_setzero_pd();
    __m256d acci = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ar = _mm256_loadu_pd(are + i);
        __m256d ai = _mm256_loadu_pd(aim + i);
        __m256d br = _mm256_loadu_pd(bre + i);
        __m256d bi = _mm256_loadu_pd(bim + i);
        accr = _mm256_fmadd_pd(ar, br, accr);
        accr = _mm256_fnmadd_pd(ai, bi, accr);
        acci = _mm256_fmadd_pd(ar, bi, acci);
        acci = _mm256_fmadd_pd(ai, br, acci);
    }
    double rr = hsum(accr), ri = hsum(acci);
    for (; i < n; ++i) {
        rr += are[i] * bre[i] - aim[i] * bim[i];
        ri += are[i] * bim[i] + aim[i] * bre[i];
    }
    *out_re = rr;
    *out_im = ri;
}

const KernelOps table{"avx2", dot_,   sum_,   sumsq_,
                      axpy_,  caxpy_, cdotc_, cdotu_};

} // namespace

const KernelOps* avx2_ops() {
    static const bool supported =
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &table : nullptr;
}

} // namespace fwm::kernels

#else

namespace fwm::kernels {
const KernelOps* avx2_ops() { return nullptr; }
} // namespace fwm::kernels

#endif
