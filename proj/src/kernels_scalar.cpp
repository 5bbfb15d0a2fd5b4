#include "fwm/kernels.hpp"

// Reference kernels. These define the semantics the SIMD variants are tested
// against; keep them as straightforward left-to-right loops.

namespace fwm::kernels {
namespace {

double dot_(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

double sumsq_(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

void axpy_(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void caxpy_(double* yre, double* yim, double are, double aim,
            const double* xre, const double* xim, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = xre[i], xi = xim[i];
        yre[i] += are * xr - aim * xi;
        yim[i] += are * xi + aim * xr;
    }
}

void cdotc_(const double* are, const double* aim, const double* bre,
            const double* bim, std::size_t n, double* out_re, double* out_im) {
    double rr = 0.0, ri = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rr += are[i] * bre[i] + aim[i] * bim[i];
        ri += are[i] * bim[i] - aim[i] * bre[i];
    }
    *out_re = rr;
    *out_im = ri;
}

void cdotu_(const double* are, const double* aim, const double* bre,
            const double* bim, std::size_t n, double* out_re, double* out_im) {
    double rr = 0.0, ri = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rr += are[i] * bre[i] - aim[i] * bim[i];
        ri += are[i] * bim[i] + aim[i] * bre[i];
    }
    *out_re = rr;
    *out_im = ri;
}

} // namespace

const KernelOps& scalar_ops() {
    static constexpr KernelOps table{"scalar", dot_,   sum_,   sumsq_,
                                     axpy_,    caxpy_, cdotc_, cdotu_};
    return table;
}

} // namespace fwm::kernels
