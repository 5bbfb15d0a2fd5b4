#include "fwm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fwm/attacks.hpp"
#include "fwm/kernels.hpp"
#include "fwm/rng.hpp"

namespace fwm {

namespace {

// Conjugate-symmetric random coefficients on the band for one channel.
// dc_pixel is the resulting mean pixel value; amp_pixel scales the rest.
void fill_band(SpectrumTensor& g, int c, const FrequencySet& band, double dc_pixel,
               double amp_pixel, Rng& rng) {
    const int M = g.rows, N = g.cols;
    const double full = static_cast<double>(M) * N;
    for (const auto& [u, v] : band.members) {
        const int pu = (M - u) % M, pv = (N - v) % N;
        if (std::make_pair(u, v) > std::make_pair(pu, pv)) continue;  // partner slot writes both
        const std::size_t i = g.idx(c, u, v);
        if (u == 0 && v == 0) {
            g.re[i] = dc_pixel * full;
            g.im[i] = 0.0;
        } else if (pu == u && pv == v) {
            g.re[i] = rng.symmetric(amp_pixel) * full;
            g.im[i] = 0.0;
        } else {
            const std::size_t j = g.idx(c, pu, pv);
            g.re[i] = rng.symmetric(amp_pixel) * full * 0.5;
            g.im[i] = rng.symmetric(amp_pixel) * full * 0.5;
            g.re[j] = g.re[i];
            g.im[j] = -g.im[i];
        }
    }
}

double pairwise_min_distance(const std::vector<std::vector<double>>& means) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < means.size(); ++a) {
        for (std::size_t b = a + 1; b < means.size(); ++b) {
            double s = 0.0;
            for (std::size_t c = 0; c < means[a].size(); ++c) {
                const double d = means[a][c] - means[b][c];
                s += d * d;
            }
            best = std::min(best, std::sqrt(s));
        }
    }
    return best;
}

} // namespace

Dataset synth_dataset(const DatasetSpec& spec) {
    if (spec.n_classes < 2) throw config_error("synth_dataset: need at least two classes");
    if (spec.samples_per_class < 1)
        throw config_error("synth_dataset: need at least one sample per class");
    const int C = spec.channels, M = spec.rows, N = spec.cols;
    const FrequencySet band = low_band_set(M, N, spec.band_limit);

    Rng root(spec.seed);

    // Class templates; redrawn until their channel means separate well. The
    // floor keeps the task easy enough that plain SGD converges within a few
    // hundred steps on any seed.
    const double min_separation = spec.n_classes <= 3 ? 0.5 : 0.3;
    std::vector<SpectrumTensor> templates;
    bool ok = false;
    for (int attempt = 0; attempt < 256 && !ok; ++attempt) {
        Rng trng = root.fork(100 + attempt);
        templates.clear();
        std::vector<std::vector<double>> means;
        for (int cls = 0; cls < spec.n_classes; ++cls) {
            SpectrumTensor g(C, M, N);
            std::vector<double> mu(C);
            for (int c = 0; c < C; ++c) {
                const double dc = trng.range(0.4, 1.4);
                mu[c] = dc;
                fill_band(g, c, band, dc, 0.18, trng);
            }
            templates.push_back(std::move(g));
            means.push_back(std::move(mu));
        }
        ok = pairwise_min_distance(means) >= min_separation;
    }
    if (!ok)
        throw config_error("synth_dataset: could not draw separable class templates; "
                           "use fewer classes or another seed");

    Dataset out;
    out.spec = spec;
    out.samples.reserve(static_cast<std::size_t>(spec.n_classes) * spec.samples_per_class);
    Rng nrng = root.fork(7);
    for (int cls = 0; cls < spec.n_classes; ++cls) {
        for (int j = 0; j < spec.samples_per_class; ++j) {
            SpectrumTensor g(C, M, N);  // per-sample in-band noise
            for (int c = 0; c < C; ++c)
                fill_band(g, c, band, nrng.symmetric(0.05), 0.06, nrng);
            for (std::size_t i = 0; i < g.re.size(); ++i) {
                g.re[i] += templates[cls].re[i];
                g.im[i] += templates[cls].im[i];
            }
            out.samples.push_back({idft2(g), cls});
        }
    }
    return out;
}

HostNetwork make_host(const HostConfig& cfg, std::uint64_t seed) {
    if (cfg.n_classes < 2) throw config_error("make_host: need at least two classes");
    Rng root(seed);
    HostNetwork host;
    host.n_classes = cfg.n_classes;
    host.channels = cfg.channels;
    host.rows = cfg.rows;
    host.cols = cfg.cols;
    host.backbone = seeded_random_bank(cfg.backbone_filters, cfg.channels, cfg.ksize,
                                       root.fork(1).bits(), cfg.backbone_scale);
    host.has_watermark = cfg.with_watermark;
    if (cfg.with_watermark) {
        host.wm.bank = seeded_random_bank(cfg.wm_filters, cfg.channels, cfg.ksize,
                                          root.fork(2).bits(), cfg.wm_scale);
        // Zero-sum kernels with zero biases: the pooled branch output starts
        // at exactly zero, so plain training leaves the branch disconnected
        // from the head while the carrier components stay fully random.
        const int kk = cfg.ksize * cfg.ksize;
        for (int d = 0; d < cfg.wm_filters; ++d) {
            for (int c = 0; c < cfg.channels; ++c) {
                double* w = host.wm.bank.filter(d) + static_cast<std::size_t>(c) * kk;
                double mean = 0.0;
                for (int i = 0; i < kk; ++i) mean += w[i];
                mean /= kk;
                for (int i = 0; i < kk; ++i) w[i] -= mean;
            }
        }
        std::fill(host.wm.bank.biases.begin(), host.wm.bank.biases.end(), 0.0);
        host.wm.radius = cfg.radius;
        host.wm.rows = cfg.rows;
        host.wm.cols = cfg.cols;
    }
    const int F = host.feature_count(), O = host.head_outputs();
    host.head_w.assign(static_cast<std::size_t>(O) * F, 0.0);
    host.head_b.assign(static_cast<std::size_t>(O), 0.0);
    if (cfg.head_scale > 0.0) {
        Rng hrng = root.fork(3);
        for (double& w : host.head_w) w = hrng.symmetric(cfg.head_scale);
        for (double& b : host.head_b) b = hrng.symmetric(cfg.head_scale);
    }
    return host;
}

void HostGradients::reset(const HostNetwork& host) {
    backbone_w.assign(host.backbone.weights.size(), 0.0);
    backbone_b.assign(host.backbone.biases.size(), 0.0);
    if (host.has_watermark) {
        wm_w.assign(host.wm.bank.weights.size(), 0.0);
        wm_b.assign(host.wm.bank.biases.size(), 0.0);
    } else {
        wm_w.clear();
        wm_b.clear();
    }
    head_w.assign(host.head_w.size(), 0.0);
    head_b.assign(host.head_b.size(), 0.0);
}

namespace {

void pooled_features(const FilterBank& bank, const FeatureTensor& x, double* out) {
    const auto& k = kernels::active();
    const std::vector<OutputMap> maps = conv_forward(bank, x);
    const double inv = 1.0 / (static_cast<double>(x.rows) * x.cols);
    for (std::size_t d = 0; d < maps.size(); ++d)
        out[d] = k.sum(maps[d].data.data(), maps[d].data.size()) * inv;
}

// logits -> probabilities; returns -log p[target].
double softmax_ce(const std::vector<double>& logits, int target, std::vector<double>& probs) {
    const double top = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    probs.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - top);
        z += probs[i];
    }
    for (double& p : probs) p /= z;
    return std::log(z) - (logits[target] - top);
}

void head_logits(const HostNetwork& host, const std::vector<double>& z,
                 std::vector<double>& logits) {
    const auto& k = kernels::active();
    const int F = host.feature_count(), O = host.head_outputs();
    logits.resize(O);
    for (int o = 0; o < O; ++o)
        logits[o] = host.head_b[o] +
                    k.dot(host.head_w.data() + static_cast<std::size_t>(o) * F, z.data(), F);
}

std::vector<OutputMap> uniform_upstream(const std::vector<double>& g, int rows, int cols) {
    // Pooling spreads dLoss/dfeature evenly over the map.
    const double inv = 1.0 / (static_cast<double>(rows) * cols);
    std::vector<OutputMap> maps;
    maps.reserve(g.size());
    for (double gd : g) {
        OutputMap m(rows, cols);
        std::fill(m.data.begin(), m.data.end(), gd * inv);
        maps.push_back(std::move(m));
    }
    return maps;
}

void accumulate(std::vector<double>& dst, const std::vector<double>& src) {
    kernels::active().axpy(dst.data(), 1.0, src.data(), src.size());
}

} // namespace

double sample_loss_cached(const HostNetwork& host, const FeatureTensor& x,
                          const FeatureTensor* x_low, int label, double lambda,
                          std::span<const double> wm_noise, HostGradients* grads) {
    if (label < 0 || label >= host.n_classes)
        throw config_error("sample_loss: label out of range");
    if (x.channels != host.channels || x.rows != host.rows || x.cols != host.cols)
        throw shape_error("sample_loss: input shape does not match the host");
    const auto& k = kernels::active();
    const int Db = host.backbone.filters;
    const int Dw = host.has_watermark ? host.wm.bank.filters : 0;
    const int F = host.feature_count(), O = host.head_outputs();
    const bool perturbed = lambda != 0.0 && host.has_watermark;
    if (host.has_watermark && x_low == nullptr)
        throw shape_error("sample_loss: low-passed input required with a watermark branch");
    if (perturbed && wm_noise.size() != host.wm.bank.weights.size())
        throw shape_error("sample_loss: noise size does not match the wm weights");

    std::vector<double> z(F);
    pooled_features(host.backbone, x, z.data());
    if (Dw > 0) pooled_features(host.wm.bank, *x_low, z.data() + Db);

    std::vector<double> logits, probs;
    head_logits(host, z, logits);
    double loss = softmax_ce(logits, label, probs);

    std::vector<double> z2, probs2;
    FilterBank noisy_bank;
    if (perturbed) {
        noisy_bank = host.wm.bank;
        k.axpy(noisy_bank.weights.data(), 1.0, wm_noise.data(), wm_noise.size());
        z2 = z;
        pooled_features(noisy_bank, *x_low, z2.data() + Db);
        std::vector<double> logits2;
        head_logits(host, z2, logits2);
        loss += lambda * softmax_ce(logits2, host.pseudo_class(), probs2);
    }

    if (!grads) return loss;

    std::vector<double> dlog(O), dlog2(O, 0.0);
    for (int o = 0; o < O; ++o) dlog[o] = probs[o];
    dlog[label] -= 1.0;
    if (perturbed) {
        for (int o = 0; o < O; ++o) dlog2[o] = lambda * probs2[o];
        dlog2[host.pseudo_class()] -= lambda;
    }

    for (int o = 0; o < O; ++o) {
        grads->head_b[o] += dlog[o] + dlog2[o];
        double* row = grads->head_w.data() + static_cast<std::size_t>(o) * F;
        k.axpy(row, dlog[o], z.data(), F);
        if (perturbed) k.axpy(row, dlog2[o], z2.data(), F);
    }

    std::vector<double> dz(F, 0.0), dz2(F, 0.0);
    for (int o = 0; o < O; ++o) {
        const double* row = host.head_w.data() + static_cast<std::size_t>(o) * F;
        k.axpy(dz.data(), dlog[o], row, F);
        if (perturbed) k.axpy(dz2.data(), dlog2[o], row, F);
    }

    // Both branches share the backbone features.
    std::vector<double> gb(dz.begin(), dz.begin() + Db);
    if (perturbed) k.axpy(gb.data(), 1.0, dz2.data(), Db);
    GradientBundle bb = conv_backward(host.backbone, x,
                                      uniform_upstream(gb, x.rows, x.cols), false);
    accumulate(grads->backbone_w, bb.d_weights);
    accumulate(grads->backbone_b, bb.d_biases);

    if (Dw > 0) {
        std::vector<double> gw(dz.begin() + Db, dz.end());
        GradientBundle wb = conv_backward(host.wm.bank, *x_low,
                                          uniform_upstream(gw, x.rows, x.cols), false);
        accumulate(grads->wm_w, wb.d_weights);
        accumulate(grads->wm_b, wb.d_biases);
        if (perturbed) {
            std::vector<double> gw2(dz2.begin() + Db, dz2.end());
            GradientBundle wb2 = conv_backward(noisy_bank, *x_low,
                                               uniform_upstream(gw2, x.rows, x.cols), false);
            accumulate(grads->wm_w, wb2.d_weights);  // d/dW at W + eps applies to W
            accumulate(grads->wm_b, wb2.d_biases);
        }
    }
    return loss;
}

double sample_loss(const HostNetwork& host, const FeatureTensor& x, int label,
                   double lambda, std::span<const double> wm_noise,
                   HostGradients* grads) {
    if (!host.has_watermark)
        return sample_loss_cached(host, x, nullptr, label, lambda, wm_noise, grads);
    const FeatureTensor x_low = low_pass(x, host.wm.radius);
    return sample_loss_cached(host, x, &x_low, label, lambda, wm_noise, grads);
}

namespace {

// Caps for the max-norm projection below. Orders of magnitude above what the
// classifier needs, they only stop runaway scale growth.
constexpr double kHeadRowCap = 25.0;
constexpr double kFilterCap = 10.0;

void cap_span(double* p, std::size_t n, double cap) {
    const double norm = std::sqrt(kernels::active().sumsq(p, n));
    if (norm > cap) {
        const double s = cap / norm;
        for (std::size_t i = 0; i < n; ++i) p[i] *= s;
    }
}

// Backbone and head live under a max-norm constraint; the softmax margins
// then settle at a finite scale instead of racing the tamper term upward.
// The watermark branch is exempt: its weights are the embedded mark.
void project_theta(HostNetwork& host) {
    const int F = host.feature_count();
    for (int o = 0; o < host.head_outputs(); ++o)
        cap_span(host.head_w.data() + static_cast<std::size_t>(o) * F, F, kHeadRowCap);
    cap_span(host.head_b.data(), host.head_b.size(), kHeadRowCap);
    const std::size_t per = host.backbone.weights_per_filter();
    for (int d = 0; d < host.backbone.filters; ++d)
        cap_span(host.backbone.weights.data() + d * per, per, kFilterCap);
    cap_span(host.backbone.biases.data(), host.backbone.biases.size(), kFilterCap);
}

void apply_gradients(HostNetwork& host, const HostGradients& g, double lr) {
    const auto& k = kernels::active();
    k.axpy(host.backbone.weights.data(), -lr, g.backbone_w.data(), g.backbone_w.size());
    k.axpy(host.backbone.biases.data(), -lr, g.backbone_b.data(), g.backbone_b.size());
    if (host.has_watermark) {
        k.axpy(host.wm.bank.weights.data(), -lr, g.wm_w.data(), g.wm_w.size());
        k.axpy(host.wm.bank.biases.data(), -lr, g.wm_b.data(), g.wm_b.size());
    }
    k.axpy(host.head_w.data(), -lr, g.head_w.data(), g.head_w.size());
    k.axpy(host.head_b.data(), -lr, g.head_b.data(), g.head_b.size());
    project_theta(host);
}

} // namespace

HostNetwork train(const HostNetwork& host0, const Dataset& data, const LossConfig& loss,
                  const SgdConfig& sgd, int batch, std::vector<TrainLogRow>* log) {
    if (sgd.steps < 0) throw config_error("train: negative step count");
    if (data.samples.empty()) throw config_error("train: empty dataset");
    if (sgd.steps == 0) return host0;
    if (!(sgd.eta > 0.0)) throw config_error("train: learning rate must be positive");
    batch = std::clamp<int>(batch, 1, static_cast<int>(data.samples.size()));

    HostNetwork host = host0;

    std::vector<FeatureTensor> xlow;
    if (host.has_watermark) {
        xlow.reserve(data.samples.size());
        for (const LabeledSample& s : data.samples)
            xlow.push_back(low_pass(s.x, host.wm.radius));
    }

    Rng root(loss.noise_seed);
    Rng noise_rng = root.fork(1);
    Rng order_rng = root.fork(2);
    std::vector<std::size_t> order(data.samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t cursor = order.size();

    HostGradients grads;
    std::vector<double> eps;
    for (int step = 0; step < sgd.steps; ++step) {
        if (loss.lambda != 0.0 && host.has_watermark)
            eps = draw_overwrite_noise(host.wm.bank, loss.noise_ratio, host.wm.rows,
                                       host.wm.cols, noise_rng);
        grads.reset(host);
        double batch_loss = 0.0;
        for (int b = 0; b < batch; ++b) {
            if (cursor == order.size()) {
                shuffle(order, order_rng);
                cursor = 0;
            }
            const std::size_t si = order[cursor++];
            batch_loss += sample_loss_cached(host, data.samples[si].x,
                                             host.has_watermark ? &xlow[si] : nullptr,
                                             data.samples[si].label, loss.lambda, eps, &grads);
        }
        batch_loss /= batch;
        if (!std::isfinite(batch_loss))
            throw numeric_error("train: loss diverged at step " + std::to_string(step));
        apply_gradients(host, grads, sgd.eta / batch);
        if (log) log->push_back({step, batch_loss});
    }
    return host;
}

double evaluate(const HostNetwork& host, const Dataset& data) {
    if (data.samples.empty()) throw config_error("evaluate: empty dataset");
    std::size_t correct = 0;
    std::vector<double> z(host.feature_count()), logits;
    for (const LabeledSample& s : data.samples) {
        pooled_features(host.backbone, s.x, z.data());
        if (host.has_watermark) {
            const FeatureTensor x_low = low_pass(s.x, host.wm.radius);
            pooled_features(host.wm.bank, x_low, z.data() + host.backbone.filters);
        }
        head_logits(host, z, logits);
        const int pred = static_cast<int>(
            std::max_element(logits.begin(), logits.end()) - logits.begin());
        if (pred == s.label) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(data.samples.size());
}

} // namespace fwm
