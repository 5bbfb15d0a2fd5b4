#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fwm/error.hpp"

namespace fwm {

/// Dense real tensor, row-major with index order (channel, row, col).
/// The layout is part of the file-format contract; do not change it.
struct FeatureTensor {
    int channels = 0;
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    FeatureTensor() = default;
    FeatureTensor(int c, int m, int n);

    double& at(int c, int m, int n) {
        return data[(static_cast<std::size_t>(c) * rows + m) * cols + n];
    }
    double at(int c, int m, int n) const {
        return data[(static_cast<std::size_t>(c) * rows + m) * cols + n];
    }
    double* channel(int c) {
        return data.data() + static_cast<std::size_t>(c) * rows * cols;
    }
    const double* channel(int c) const {
        return data.data() + static_cast<std::size_t>(c) * rows * cols;
    }
    std::size_t size() const { return data.size(); }
    bool same_shape(const FeatureTensor& o) const {
        return channels == o.channels && rows == o.rows && cols == o.cols;
    }
};

/// Single spatial map produced by one filter.
struct OutputMap {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    OutputMap() = default;
    OutputMap(int m, int n);

    double& at(int m, int n) { return data[static_cast<std::size_t>(m) * cols + n]; }
    double at(int m, int n) const { return data[static_cast<std::size_t>(m) * cols + n]; }
    double* row(int m) { return data.data() + static_cast<std::size_t>(m) * cols; }
    const double* row(int m) const { return data.data() + static_cast<std::size_t>(m) * cols; }
};

/// D convolutional filters of C channels and K x K kernels plus one bias per
/// filter. Weight layout (d, c, t, s), row-major.
struct FilterBank {
    int filters = 0;
    int channels = 0;
    int ksize = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    FilterBank() = default;
    FilterBank(int d, int c, int k);

    std::size_t weights_per_filter() const {
        return static_cast<std::size_t>(channels) * ksize * ksize;
    }
    double& w(int d, int c, int t, int s) {
        return weights[((static_cast<std::size_t>(d) * channels + c) * ksize + t) * ksize + s];
    }
    double w(int d, int c, int t, int s) const {
        return weights[((static_cast<std::size_t>(d) * channels + c) * ksize + t) * ksize + s];
    }
    double* filter(int d) { return weights.data() + d * weights_per_filter(); }
    const double* filter(int d) const { return weights.data() + d * weights_per_filter(); }
    bool same_shape(const FilterBank& o) const {
        return filters == o.filters && channels == o.channels && ksize == o.ksize;
    }
};

/// Complex values stored as separate planes; keeps the transforms stride-1
/// over both parts.
struct ComplexMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> re, im;

    ComplexMatrix() = default;
    ComplexMatrix(int m, int n);

    std::size_t idx(int m, int n) const { return static_cast<std::size_t>(m) * cols + n; }
};

/// Entries uniform in [-scale, scale]; identical output for identical
/// (shape, seed) on every platform.
FeatureTensor seeded_random_tensor(int channels, int rows, int cols,
                                   std::uint64_t seed, double scale = 1.0);
FilterBank seeded_random_bank(int filters, int channels, int ksize,
                              std::uint64_t seed, double scale = 1.0);

double l2_norm(std::span<const double> v);
double l2_norm(const FeatureTensor& t);
double l2_norm(const OutputMap& m);
/// Weights only; biases are not part of the watermark and are excluded from
/// noise-magnitude bookkeeping.
double l2_norm(const FilterBank& bank);

/// Re(conj(z1) . z2) / (|z1| |z2|) for split-plane complex vectors, clamped
/// to [-1, 1]. Throws numeric_error when either vector is zero.
double complex_cosine(std::span<const double> re1, std::span<const double> im1,
                      std::span<const double> re2, std::span<const double> im2);

} // namespace fwm
