#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fwm/conv.hpp"
#include "fwm/spectral.hpp"

namespace fwm {

/// Predicted per-frequency change of a filter bank's spectra for one descent
/// step, plus the per-frequency mean norm over filters.
struct DeltaSpectrum {
    int filters = 0, channels = 0, rows = 0, cols = 0;
    std::vector<double> re, im;   // (d, c, u, v)
    std::vector<double> norms;    // (u, v): mean over d of the channel-vector norm

    std::size_t idx(int d, int c, int u, int v) const {
        return ((static_cast<std::size_t>(d) * channels + c) * rows + u) * cols + v;
    }
};

/// dLoss/dY expressed in the frequency domain: (1/MN) * dft2(upstream).
SpectrumTensor loss_spectrum(const OutputMap& upstream);

/// Closed-form spectral prediction of a single descent step:
/// delta(d,c,u,v) = -eta * sum_{u',v'} A(u,v,u',v') * P_d(u',v') * conj(FX_c(u',v'))
/// where P_d is loss_spectrum of filter d's upstream map.
DeltaSpectrum predict_delta(const FilterBank& bank, const SpectrumTensor& x_spectrum,
                            const std::vector<SpectrumTensor>& upstream_spectra,
                            double eta);

/// Checks that one weight step moves every kernel-spectrum entry by exactly
/// -eta * MN times the spectral gradient; returns the largest deviation.
struct StepEquivalenceReport {
    double max_deviation = 0.0;
};
StepEquivalenceReport verify_step_equivalence(const FilterBank& bank,
                                              const FeatureTensor& x,
                                              const std::vector<OutputMap>& upstream,
                                              double eta);

/// heatmap(u,v) = mean over filters of |T_uv(after_d) - T_uv(before_d)|,
/// the per-frequency drift of the kernel spectra between two snapshots.
std::vector<double> stability_heatmap(const FilterBank& before, const FilterBank& after,
                                      int rows, int cols);

/// Rearranges a heatmap so frequency (0,0) lands at the grid center
/// (the usual spectrum-display convention).
std::vector<double> center_shift(const std::vector<double>& heatmap, int rows, int cols);

/// (mean over set members, mean over complement) of a heatmap; the ratio
/// quantifies how depressed the set is relative to everything else.
std::pair<double, double> heatmap_set_means(const std::vector<double>& heatmap,
                                            int rows, int cols,
                                            const FrequencySet& set);

struct VerifierResult {
    std::string name;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Seeded spot-checks of the spectral identities this library is built on;
/// returns one row per check with its observed deviation.
std::vector<VerifierResult> run_verifier_suite(std::uint64_t seed);

} // namespace fwm
