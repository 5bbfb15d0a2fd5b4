#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fwm/conv.hpp"
#include "fwm/watermark.hpp"

namespace fwm {

/// Synthetic band-limited classification task: every sample's spectrum lives
/// inside the low band of the given radius, so the premise behind the
/// carrier-frequency stability holds for anything downstream.
struct DatasetSpec {
    int n_classes = 2;
    int samples_per_class = 48;
    int channels = 2;
    int rows = 9, cols = 9;
    std::uint64_t seed = 0;
    int band_limit = 1;
};

struct LabeledSample {
    FeatureTensor x;
    int label = 0;  // 0-based, in [0, n_classes)
};

struct Dataset {
    DatasetSpec spec;
    std::vector<LabeledSample> samples;
};

/// Per-class fixed low-band template plus small in-band noise per sample.
/// Deterministic per seed; class templates are redrawn until their channel
/// means are pairwise separated, which keeps the task learnable.
Dataset synth_dataset(const DatasetSpec& spec);

struct LossConfig {
    double lambda = 5e-4;
    double noise_ratio = 0.5;
    std::uint64_t noise_seed = 0;
};

/// Minimal host: one circular conv backbone, global average pooling, and a
/// linear head over n+1 classes (the extra output is the tamper class). The
/// watermark branch runs in parallel on the backbone input; its pooled maps
/// are concatenated to the backbone features ahead of the head.
struct HostNetwork {
    int n_classes = 2;
    int channels = 2, rows = 9, cols = 9;
    FilterBank backbone;
    bool has_watermark = false;
    WatermarkModule wm;          // meaningful only when has_watermark
    std::vector<double> head_w;  // (n_classes + 1) x feature_count, row-major
    std::vector<double> head_b;  // (n_classes + 1)

    int feature_count() const {
        return backbone.filters + (has_watermark ? wm.bank.filters : 0);
    }
    int head_outputs() const { return n_classes + 1; }
    int pseudo_class() const { return n_classes; }
};

struct HostConfig {
    int n_classes = 2;
    int channels = 2, rows = 9, cols = 9;
    int backbone_filters = 8;
    int wm_filters = 16;
    int ksize = 3;
    int radius = kDefaultRadius;
    bool with_watermark = true;
    double backbone_scale = 0.5;
    double wm_scale = 0.5;
    double head_scale = 0.0;  // head starts at zero unless asked otherwise
};

HostNetwork make_host(const HostConfig& cfg, std::uint64_t seed);

struct HostGradients {
    std::vector<double> backbone_w, backbone_b;
    std::vector<double> wm_w, wm_b;
    std::vector<double> head_w, head_b;

    void reset(const HostNetwork& host);
};

/// Loss of one sample: cross-entropy on the true class, plus
/// lambda * cross-entropy pushing the noise-perturbed network toward the
/// tamper class. wm_noise is the additive weight perturbation of that second
/// term (layout matches the wm weight vector); pass empty with lambda = 0
/// for plain cross-entropy. Gradients, when requested, are accumulated.
double sample_loss(const HostNetwork& host, const FeatureTensor& x, int label,
                   double lambda, std::span<const double> wm_noise,
                   HostGradients* grads = nullptr);

/// Same, with the low-passed input precomputed by the caller (training loops
/// reuse it across steps).
double sample_loss_cached(const HostNetwork& host, const FeatureTensor& x,
                          const FeatureTensor* x_low, int label, double lambda,
                          std::span<const double> wm_noise,
                          HostGradients* grads = nullptr);

struct TrainLogRow {
    int step = 0;
    double loss = 0.0;
};

/// Mini-batch SGD for sgd.steps steps; the perturbation of the defended loss
/// term is redrawn every step. Deterministic for fixed seeds. Throws
/// numeric_error if the loss stops being finite.
HostNetwork train(const HostNetwork& host, const Dataset& data, const LossConfig& loss,
                  const SgdConfig& sgd, int batch = 16,
                  std::vector<TrainLogRow>* log = nullptr);

/// Percentage of samples whose top logit is the true class. The tamper class
/// is never correct.
double evaluate(const HostNetwork& host, const Dataset& data);

} // namespace fwm
