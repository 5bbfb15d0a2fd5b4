#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fwm/attacks.hpp"
#include "fwm/trainer.hpp"
#include "fwm/watermark.hpp"

namespace fwm {

struct TrainingMeta {
    double lambda = 5e-4;
    double noise_ratio = 0.5;
    int steps = 0;
    double eta = 0.0;
    int batch = 0;
    std::uint64_t dataset_seed = 0;
    double final_loss = 0.0;
    double clean_accuracy = -1.0;
    double attacked_accuracy = -1.0;
};

/// On-disk model: full host parameters plus how it was trained. Doubles are
/// serialized with shortest round-trip decimals, so load(save(m)) is
/// bit-exact.
struct ModelFile {
    int version = 1;
    std::uint64_t seed = 0;
    HostNetwork host;
    TrainingMeta meta;
};

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

void save_signature(const std::filesystem::path& path, const WatermarkSignature& sig,
                    double tau_default = kDefaultTau);
/// Components are re-sorted into canonical frequency order on load, so file
/// ordering does not affect detection.
WatermarkSignature load_signature(const std::filesystem::path& path);

AttackSpec parse_attack_spec(const std::string& text);
AttackSpec load_attack_spec(const std::filesystem::path& path);

void save_report(const std::filesystem::path& path, const DetectionReport& report,
                 const WatermarkSignature& src);

/// Header line of column indices, then one row of values per frequency row u.
void write_heatmap_csv(const std::filesystem::path& path, const std::vector<double>& heatmap,
                       int rows, int cols, bool centered);

void write_training_log_csv(const std::filesystem::path& path,
                            const std::vector<TrainLogRow>& log);

/// Write-to-temp plus rename; partially written files never take the
/// destination name.
void atomic_write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace fwm
