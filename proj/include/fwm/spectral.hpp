#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "fwm/tensor.hpp"

namespace fwm {

/// Complex spectrum of a C x M x N real tensor; entry (c, u, v).
/// When sourced from real data it is conjugate-symmetric:
/// G(c,u,v) = conj(G(c, (M-u) mod M, (N-v) mod N)).
struct SpectrumTensor {
    int channels = 0;
    int rows = 0;
    int cols = 0;
    std::vector<double> re, im;

    SpectrumTensor() = default;
    SpectrumTensor(int c, int m, int n);

    std::size_t idx(int c, int u, int v) const {
        return (static_cast<std::size_t>(c) * rows + u) * cols + v;
    }
    std::complex<double> at(int c, int u, int v) const {
        return {re[idx(c, u, v)], im[idx(c, u, v)]};
    }
    double* re_channel(int c) { return re.data() + static_cast<std::size_t>(c) * rows * cols; }
    double* im_channel(int c) { return im.data() + static_cast<std::size_t>(c) * rows * cols; }
    const double* re_channel(int c) const { return re.data() + static_cast<std::size_t>(c) * rows * cols; }
    const double* im_channel(int c) const { return im.data() + static_cast<std::size_t>(c) * rows * cols; }
};

/// Spectra of a filter bank under the kernel transform, evaluated against an
/// M x N feature grid; entry (d, c, u, v). The transform depends on M and N,
/// not only on K, so the grid geometry is recorded alongside.
struct FilterSpectrum {
    int filters = 0;
    int channels = 0;
    int ksize = 0;
    int rows = 0;
    int cols = 0;
    std::vector<double> re, im;

    FilterSpectrum() = default;
    FilterSpectrum(int d, int c, int k, int m, int n);

    std::size_t idx(int d, int c, int u, int v) const {
        return ((static_cast<std::size_t>(d) * channels + c) * rows + u) * cols + v;
    }
    std::complex<double> at(int d, int c, int u, int v) const {
        return {re[idx(d, c, u, v)], im[idx(d, c, u, v)]};
    }
};

enum class FreqSetKind { StableExact, StableRounded, LowBand };

/// A set of (u, v) grid frequencies, sorted row-major and duplicate-free.
struct FrequencySet {
    FreqSetKind kind = FreqSetKind::StableExact;
    int rows = 0;
    int cols = 0;
    int ksize = 0;   // StableExact / StableRounded
    int radius = 0;  // LowBand
    /// False when the exact-kind set had to drop fractional frequencies
    /// because M or N is not divisible by K.
    bool complete = true;
    std::vector<std::pair<int, int>> members;

    bool contains(int u, int v) const;
};

/// Forward 2-D transform per channel:
/// G(u,v) = sum_{m,n} X(m,n) exp(-i 2pi (um/M + vn/N)).
/// Evaluated as exact row/column regrouping of the direct double sum.
SpectrumTensor dft2(const FeatureTensor& x);
SpectrumTensor dft2(const OutputMap& y);

/// Inverse transform, X(m,n) = (1/MN) sum_{u,v} G(u,v) exp(+i 2pi (...)).
/// The imaginary residue must stay below imag_tol or a numeric_error is
/// thrown; the residue is then discarded.
FeatureTensor idft2(const SpectrumTensor& g, double imag_tol = 1e-9);

/// Transform of a K x K kernel on the M x N feature grid:
/// Q(u,v) = sum_{t,s} W(t,s) exp(+i 2pi (ut/M + vs/N)).
/// Note the positive exponent and the M, N denominators; for K < M this
/// transform is not invertible.
FilterSpectrum filter_transform(const FilterBank& bank, int rows, int cols);

/// sum_{n=0}^{count-1} exp(i n theta) in closed form,
/// sin(count*theta/2)/sin(theta/2) * exp(i (count-1) theta/2),
/// with the analytic limit (= count) when theta is a multiple of 2pi.
std::complex<double> geometric_phase_sum(int count, double theta);

/// A(u,v,u',v') = sum_{t,s<K} exp(i 2pi ((u-u')t/M + (v-v')s/N)); the factor
/// coupling a spectral step at output frequency (u',v') to the kernel
/// spectrum at (u,v). Equals K^2 exactly when (u,v) = (u',v').
std::complex<double> coupling_coefficient(int u, int v, int u2, int v2,
                                          int rows, int cols, int ksize);

/// Full coupling table; the value depends only on
/// ((u-u') mod M, (v-v') mod N), stored once per difference.
struct CouplingMatrix {
    int rows = 0, cols = 0, ksize = 0;
    std::vector<double> re, im;  // indexed (du, dv)

    std::complex<double> diff(int du, int dv) const {
        const std::size_t i = static_cast<std::size_t>(du) * cols + dv;
        return {re[i], im[i]};
    }
    std::complex<double> at(int u, int v, int u2, int v2) const {
        const int du = ((u - u2) % rows + rows) % rows;
        const int dv = ((v - v2) % cols + cols) % cols;
        return diff(du, dv);
    }
};
CouplingMatrix build_coupling(int rows, int cols, int ksize);

int kronecker_delta(int u, int v);

/// Frequencies { u = iM/K or v = jN/K, 1 <= i,j < K } restricted to the
/// integer grid. Fractional candidates are dropped and flagged via
/// FrequencySet::complete.
FrequencySet stable_set_exact(int rows, int cols, int ksize);

/// Same construction with every candidate rounded half-away-from-zero to the
/// nearest grid frequency.
FrequencySet stable_set_rounded(int rows, int cols, int ksize);

/// Low band u in [0,r] U [M-r, M), v in [0,r] U [N-r, N). Requires
/// 1 <= radius <= 2 and 2r+1 <= min(M, N).
FrequencySet low_band_set(int rows, int cols, int radius);

/// Spectral projection keeping only the low band: transform, zero every
/// component outside low_band_set, inverse-transform. Output is real because
/// the band is closed under conjugate symmetry.
FeatureTensor low_pass(const FeatureTensor& x, int radius);

} // namespace fwm
