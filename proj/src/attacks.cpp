#include "fwm/attacks.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "fwm/kernels.hpp"

namespace fwm {

WatermarkModule attack_scale(const WatermarkModule& module, double a) {
    if (!(a > 0.0)) throw config_error("scale attack requires a > 0");
    WatermarkModule out = module;
    for (double& w : out.bank.weights) w *= a;
    for (double& b : out.bank.biases) b *= a;
    return out;
}

std::pair<WatermarkModule, std::vector<int>> attack_permute(const WatermarkModule& module,
                                                            std::uint64_t seed) {
    const int D = module.bank.filters;
    if (D < 2) throw config_error("permute attack needs at least two filters");

    std::vector<int> order(D);  // order[j] = source filter placed at slot j
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    shuffle(order, rng);

    WatermarkModule out = module;
    const std::size_t per = module.bank.weights_per_filter();
    for (int j = 0; j < D; ++j) {
        const double* src = module.bank.filter(order[j]);
        std::copy(src, src + per, out.bank.filter(j));
        out.bank.biases[j] = module.bank.biases[order[j]];
    }
    std::vector<int> placement(D);
    for (int j = 0; j < D; ++j) placement[order[j]] = j;
    return {out, placement};
}

std::vector<double> overwrite_patch(int u0, int v0, int ksize, int rows, int cols) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> patch(static_cast<std::size_t>(ksize) * ksize);
    for (int t = 0; t < ksize; ++t)
        for (int s = 0; s < ksize; ++s)
            patch[static_cast<std::size_t>(t) * ksize + s] =
                std::cos(two_pi * (static_cast<double>(u0) * t / rows +
                                   static_cast<double>(v0) * s / cols));
    return patch;
}

std::vector<double> draw_overwrite_noise(const FilterBank& bank, double ratio,
                                         int rows, int cols, Rng& rng) {
    if (!(ratio > 0.0)) throw config_error("overwrite noise ratio must be > 0");
    const auto& k = kernels::active();
    const int D = bank.filters, C = bank.channels, K = bank.ksize;
    const std::size_t per = bank.weights_per_filter();

    std::vector<double> noise(bank.weights.size(), 0.0);
    for (int d = 0; d < D; ++d) {
        const int u0 = static_cast<int>(rng.index(static_cast<std::size_t>(rows)));
        const int v0 = static_cast<int>(rng.index(static_cast<std::size_t>(cols)));
        const std::vector<double> patch = overwrite_patch(u0, v0, K, rows, cols);
        const double raw = std::sqrt(C * k.sumsq(patch.data(), patch.size()));
        const double wnorm = std::sqrt(k.sumsq(bank.filter(d), per));
        const double alpha = raw > 0.0 ? ratio * wnorm / raw : 0.0;
        double* out = noise.data() + static_cast<std::size_t>(d) * per;
        for (int c = 0; c < C; ++c)
            for (std::size_t i = 0; i < patch.size(); ++i)
                out[static_cast<std::size_t>(c) * patch.size() + i] = alpha * patch[i];
    }
    return noise;
}

WatermarkModule attack_overwrite(const WatermarkModule& module, double noise_ratio,
                                 std::uint64_t seed) {
    Rng rng(seed);
    const std::vector<double> noise =
        draw_overwrite_noise(module.bank, noise_ratio, module.rows, module.cols, rng);
    WatermarkModule out = module;
    kernels::active().axpy(out.bank.weights.data(), 1.0, noise.data(), noise.size());
    return out;
}

HostNetwork attack_finetune(const HostNetwork& host, const DatasetSpec& task,
                            const SgdConfig& cfg, int batch) {
    const Dataset data = synth_dataset(task);
    LossConfig loss;
    loss.lambda = 0.0;  // the attacker trains normally, no tamper term
    loss.noise_seed = splitmix64(task.seed ^ 0xf1e7);
    return train(host, data, loss, cfg, batch);
}

} // namespace fwm
