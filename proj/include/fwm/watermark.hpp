#pragma once

#include <utility>
#include <vector>

#include "fwm/spectral.hpp"
#include "fwm/tensor.hpp"

namespace fwm {

inline constexpr double kDefaultTau = 0.995;
inline constexpr int kDefaultRadius = 1;

/// A bank of circular-conv filters fed through a low-pass projection of the
/// input; the carrier of the ownership mark.
struct WatermarkModule {
    FilterBank bank;
    int radius = kDefaultRadius;
    int rows = 0, cols = 0;  // feature grid the module operates on
};

/// Kernel-spectrum components restricted to the rounded stable frequencies,
/// the part of the module that survives training. Components are stored
/// filter-major, channel-second, frequency-third; the frequency list is kept
/// in canonical row-major order.
struct WatermarkSignature {
    int filters = 0, channels = 0, ksize = 0, rows = 0, cols = 0;
    int radius = kDefaultRadius;
    std::vector<std::pair<int, int>> frequencies;
    std::vector<double> re, im;  // (d, c, k)

    std::size_t idx(int d, int c, int k) const {
        return (static_cast<std::size_t>(d) * channels + c) * frequencies.size() + k;
    }
    std::size_t component_count() const { return frequencies.size() * filters; }
    bool compatible(const WatermarkSignature& o) const {
        return filters == o.filters && channels == o.channels && ksize == o.ksize &&
               rows == o.rows && cols == o.cols && frequencies == o.frequencies;
    }
};

/// Per-component matching outcome. cosines(d, k) holds the similarity of
/// source filter d and its matched suspect filter at the k-th carrier
/// frequency; undefined similarities (zero vectors) are recorded as -1.
struct DetectionReport {
    std::vector<int> permutation;  // source filter d -> matched suspect index
    std::vector<double> cosines;   // (d, k) row-major
    double dr = 0.0;               // percentage of components at or above tau
    double tau = kDefaultTau;

    double cosine(int d, int k, std::size_t freq_count) const {
        return cosines[static_cast<std::size_t>(d) * freq_count + k];
    }
};

/// Forward pass of the module: convolve the low-passed input.
std::vector<OutputMap> wm_forward(const WatermarkModule& module, const FeatureTensor& x);

/// Kernel spectra of every filter restricted to the carrier frequencies.
WatermarkSignature extract_signature(const WatermarkModule& module);

/// The filter pairing that maximizes the summed per-pair mean cosine over
/// carrier frequencies, solved as an optimal assignment. Returns
/// perm[d] = suspect index matched to source filter d.
std::vector<int> match_filters(const WatermarkSignature& src, const WatermarkSignature& sus);

/// Detection rate at threshold tau after optimal filter matching.
DetectionReport detect(const WatermarkSignature& src, const WatermarkSignature& sus,
                       double tau = kDefaultTau);

} // namespace fwm
