#pragma once

#include <cstddef>

namespace fwm::kernels {

/// Primitive array kernels behind the dense math (transforms, convolutions,
/// norms). Every variant of a kernel computes the same quantity; SIMD
/// variants may reassociate additions and use FMA, so cross-variant
/// agreement is to ~1e-13 relative, not bitwise. Within one process the
/// active variant is fixed, so repeated runs are bit-identical.
struct KernelOps {
    const char* name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i a[i]
    double (*sum)(const double* a, std::size_t n);
    // sum_i a[i]^2
    double (*sumsq)(const double* a, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double* y, double a, const double* x, std::size_t n);
    // (yre + i yim)[k] += (are + i aim) * (xre + i xim)[k]
    void (*caxpy)(double* yre, double* yim, double are, double aim,
                  const double* xre, const double* xim, std::size_t n);
    // sum_k conj(a[k]) * b[k]
    void (*cdotc)(const double* are, const double* aim, const double* bre,
                  const double* bim, std::size_t n, double* out_re,
                  double* out_im);
    // sum_k a[k] * b[k], no conjugation
    void (*cdotu)(const double* are, const double* aim, const double* bre,
                  const double* bim, std::size_t n, double* out_re,
                  double* out_im);
};

/// Plain-C++ reference table; always available.
const KernelOps& scalar_ops();

/// Null unless built for x86-64 and the CPU reports AVX2+FMA.
const KernelOps* avx2_ops();

/// Null unless built for aarch64.
const KernelOps* neon_ops();

/// The table in use. Picked once per process: FWM_KERNELS={scalar,avx2,neon}
/// overrides, otherwise the best variant the CPU supports wins.
const KernelOps& active();

const char* active_name();

/// Select a variant by name (intended for tests). Throws config_error for
/// unknown or unsupported names.
void force(const char* name);

} // namespace fwm::kernels
