#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fwm/rng.hpp"
#include "fwm/trainer.hpp"
#include "fwm/watermark.hpp"

namespace fwm {

struct AttackSpec {
    enum class Kind { Scale, Permute, Overwrite, Finetune };
    Kind kind = Kind::Scale;

    double scale_a = 1.0;          // Scale
    std::uint64_t perm_seed = 0;   // Permute
    double noise_ratio = 0.5;      // Overwrite
    std::uint64_t noise_seed = 0;
    SgdConfig ft_sgd{0.1, 500};    // Finetune
    std::uint64_t ft_dataset_seed = 1;
    int ft_batch = 16;
};

/// Multiply all filter weights (and biases, so the layer output scales
/// uniformly) by a > 0.
WatermarkModule attack_scale(const WatermarkModule& module, double a);

/// Reorder filters and matching biases by a seeded random permutation.
/// Returns the attacked module and placement, where
/// attacked.filter(placement[d]) == module.filter(d).
std::pair<WatermarkModule, std::vector<int>> attack_permute(const WatermarkModule& module,
                                                            std::uint64_t seed);

/// K x K patch cos(2pi (u0 t / M + v0 s / N)): the minimal-support pattern
/// whose kernel spectrum peaks at grid frequency (u0, v0).
std::vector<double> overwrite_patch(int u0, int v0, int ksize, int rows, int cols);

/// Frequency-targeted additive weight noise: per filter, one random grid
/// frequency's patch replicated over channels and rescaled so its l2 norm is
/// ratio times that filter's weight norm. Layout matches bank.weights.
std::vector<double> draw_overwrite_noise(const FilterBank& bank, double ratio,
                                         int rows, int cols, Rng& rng);

/// Add frequency-targeted noise to the weights; biases are untouched.
/// The weight change satisfies |W' - W| = ratio * |W|.
WatermarkModule attack_overwrite(const WatermarkModule& module, double noise_ratio,
                                 std::uint64_t seed);

/// Transfer fine-tuning: plain cross-entropy SGD on a freshly synthesized
/// task, updating every parameter including the watermark branch.
HostNetwork attack_finetune(const HostNetwork& host, const DatasetSpec& task,
                            const SgdConfig& cfg, int batch = 16);

} // namespace fwm
