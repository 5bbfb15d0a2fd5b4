#include "fwm/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace fwm::kernels {
namespace {

double dot_(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double r = vaddvq_f64(acc);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

double sum_(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
    double r = vaddvq_f64(acc);
    for (; i < n; ++i) r += a[i];
    return r;
}

double sumsq_(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(a + i);
        acc = vfmaq_f64(acc, v, v);
    }
    double r = vaddvq_f64(acc);
    for (; i < n; ++i) r += a[i] * a[i];
    return r;
}

void axpy_(double* y, double a, const double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void caxpy_(double* yre, double* yim, double are, double aim,
            const double* xre, const double* xim, std::size_t n) {
    const float64x2_t var = vdupq_n_f64(are);
    const float64x2_t vai = vdupq_n_f64(aim);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t xr = vld1q_f64(xre + i);
        float64x2_t xi = vld1q_f64(xim + i);
        float64x2_t yr = vld1q_f64(yre + i);
        float64x2_t yi = vld1q_f64(yim + i);
        yr = vfmaq_f64(yr, var, xr);
        yr = vfmsq_f64(yr, vai, xi);
        yi = vfmaq_f64(yi, var, xi);
        yi = vfmaq_f64(yi, vai, xr);
        vst1q_f64(yre + i, yr);
        vst1q_f64(yim + i, yi);
    }
    for (; i < n; ++i) {
        const double xr = xre[i], xi = xim[i];
        yre[i] += are * xr - aim * xi;
        yim[i] += are * xi + aim * xr;
    }
}

void cdotc_(const double* are, const double* aim, const double* bre,
            const double* bim, std::size_t n, double* out_re, double* out_im) {
    float64x2_t accr = vdupq_n_f64(0.0);
    float64x2_t acci = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t ar = vld1q_f64(are + i);
        float64x2_t ai = vld1q_f64(aim + i);
        float64x2_t br = vld1q_f64(bre + i);
        float64x2_t bi = vld1q_f64(bim + i);
        accr = vfmaq_f64(accr, ar, br);
        accr = vfmaq_f64(accr, ai, bi);
        acci = vfmaq_f64(acci, ar, bi);
        acci = vfmsq_f64(acci, ai, br);
    }
    double rr = vaddvq_f64(accr), ri = vaddvq_f64(acci);
    for (; i < n; ++i) {
        rr += are[i] * bre[i] + aim[i] * bim[i];
        ri += are[i] * bim[i] - aim[i] * bre[i];
    }
    *out_re = rr;
    *out_im = ri;
}

void cdotu_(const double* are, const double* aim, const double* bre,
            const double* bim, std::size_t n, double* out_re, double* out_im) {
    float64x2_t accr = vdupq_n_f64(0.0);
    float64x2_t acci = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t ar = vld1q_f64(are + i);
        float64x2_t ai = vld1q_f64(aim + i);
        float64x2_t br = vld1q_f64(bre + i);
        float64x2_t bi = vld1q_f64(bim + i);
        accr = vfmaq_f64(accr, ar, br);
        accr = vfmsq_f64(accr, ai, bi);
        acci = vfmaq_f64(acci, ar, bi);
        acci = vfmaq_f64(acci, ai, br);
    }
    double rr = vaddvq_f64(accr), ri = vaddvq_f64(acci);
    for (; i < n; ++i) {
        rr += are[i] * bre[i] - aim[i] * bim[i];
        ri += are[i] * bim[i] + aim[i] * bre[i];
    }
    *out_re = rr;
    *out_im = ri;
}

const KernelOps table{"neon", dot_,   sum_,   sumsq_,
                      axpy_,  caxpy_, cdotc_, cdotu_};

} // namespace

const KernelOps* neon_ops() { return &table; }

} // namespace fwm::kernels

#else

namespace fwm::kernels {
const KernelOps* neon_ops() { return nullptr; }
} // namespace fwm::kernels

#endif
