#include "fwm/analysis.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "fwm/rng.hpp"

namespace fwm {

SpectrumTensor loss_spectrum(const OutputMap& upstream) {
    SpectrumTensor p = dft2(upstream);
    const double inv = 1.0 / (static_cast<double>(p.rows) * p.cols);
    for (double& v : p.re) v *= inv;
    for (double& v : p.im) v *= inv;
    return p;
}

DeltaSpectrum predict_delta(const FilterBank& bank, const SpectrumTensor& x_spectrum,
                            const std::vector<SpectrumTensor>& upstream_spectra,
                            double eta) {
    const int D = bank.filters, C = bank.channels, K = bank.ksize;
    const int M = x_spectrum.rows, N = x_spectrum.cols;
    if (x_spectrum.channels != C)
        throw shape_error("predict_delta: spectrum/bank channel mismatch");
    if (static_cast<int>(upstream_spectra.size()) != D)
        throw shape_error("predict_delta: one upstream spectrum per filter required");
    for (const SpectrumTensor& p : upstream_spectra)
        if (p.channels != 1 || p.rows != M || p.cols != N)
            throw shape_error("predict_delta: upstream spectrum geometry mismatch");

    const CouplingMatrix a = build_coupling(M, N, K);

    DeltaSpectrum out;
    out.filters = D;
    out.channels = C;
    out.rows = M;
    out.cols = N;
    out.re.assign(static_cast<std::size_t>(D) * C * M * N, 0.0);
    out.im.assign(out.re.size(), 0.0);

    std::vector<double> bre(static_cast<std::size_t>(M) * N), bim(bre.size());
    for (int d = 0; d < D; ++d) {
        const SpectrumTensor& p = upstream_spectra[d];
        for (int c = 0; c < C; ++c) {
            // B(u',v') = P(u',v') * conj(FX_c(u',v'))
            const double* pr = p.re.data();
            const double* pi = p.im.data();
            const double* xr = x_spectrum.re_channel(c);
            const double* xi = x_spectrum.im_channel(c);
            for (std::size_t i = 0; i < bre.size(); ++i) {
                bre[i] = pr[i] * xr[i] + pi[i] * xi[i];
                bim[i] = pi[i] * xr[i] - pr[i] * xi[i];
            }
            for (int u = 0; u < M; ++u) {
                for (int v = 0; v < N; ++v) {
                    double accr = 0.0, acci = 0.0;
                    for (int u2 = 0; u2 < M; ++u2) {
                        const int du = (u - u2 + M) % M;
                        const double* ar = a.re.data() + static_cast<std::size_t>(du) * N;
                        const double* ai = a.im.data() + static_cast<std::size_t>(du) * N;
                        const double* br = bre.data() + static_cast<std::size_t>(u2) * N;
                        const double* bi = bim.data() + static_cast<std::size_t>(u2) * N;
                        for (int v2 = 0; v2 < N; ++v2) {
                            const int dv = (v - v2 + N) % N;
                            accr += ar[dv] * br[v2] - ai[dv] * bi[v2];
                            acci += ar[dv] * bi[v2] + ai[dv] * br[v2];
                        }
                    }
                    const std::size_t o = out.idx(d, c, u, v);
                    out.re[o] = -eta * accr;
                    out.im[o] = -eta * acci;
                }
            }
        }
    }

    out.norms.assign(static_cast<std::size_t>(M) * N, 0.0);
    for (int u = 0; u < M; ++u) {
        for (int v = 0; v < N; ++v) {
            double acc = 0.0;
            for (int d = 0; d < D; ++d) {
                double s = 0.0;
                for (int c = 0; c < C; ++c) {
                    const std::size_t o = out.idx(d, c, u, v);
                    s += out.re[o] * out.re[o] + out.im[o] * out.im[o];
                }
                acc += std::sqrt(s);
            }
            out.norms[static_cast<std::size_t>(u) * N + v] = acc / D;
        }
    }
    return out;
}

StepEquivalenceReport verify_step_equivalence(const FilterBank& bank,
                                              const FeatureTensor& x,
                                              const std::vector<OutputMap>& upstream,
                                              double eta) {
    const int M = x.rows, N = x.cols;
    GradientBundle grads = conv_backward(bank, x, upstream, /*want_input_grad=*/false);

    FilterBank gbank(bank.filters, bank.channels, bank.ksize);
    gbank.weights = grads.d_weights;
    const FilterSpectrum tg = filter_transform(gbank, M, N);

    const FilterBank after = sgd_step(bank, grads, SgdConfig{eta, 1});
    const FilterSpectrum qb = filter_transform(bank, M, N);
    const FilterSpectrum qa = filter_transform(after, M, N);

    // Delta Q must equal -eta * MN * dLoss/dconj(Q), i.e. -eta * T(dW).
    StepEquivalenceReport rep;
    for (std::size_t i = 0; i < qa.re.size(); ++i) {
        const double dr = (qa.re[i] - qb.re[i]) + eta * tg.re[i];
        const double di = (qa.im[i] - qb.im[i]) + eta * tg.im[i];
        rep.max_deviation = std::max(rep.max_deviation, std::hypot(dr, di));
    }
    return rep;
}

std::vector<double> stability_heatmap(const FilterBank& before, const FilterBank& after,
                                      int rows, int cols) {
    if (!before.same_shape(after))
        throw shape_error("stability_heatmap: bank shapes differ");
    const FilterSpectrum qb = filter_transform(before, rows, cols);
    const FilterSpectrum qa = filter_transform(after, rows, cols);
    const int D = before.filters, C = before.channels;

    std::vector<double> hm(static_cast<std::size_t>(rows) * cols, 0.0);
    for (int u = 0; u < rows; ++u) {
        for (int v = 0; v < cols; ++v) {
            double acc = 0.0;
            for (int d = 0; d < D; ++d) {
                double s = 0.0;
                for (int c = 0; c < C; ++c) {
                    const std::size_t i = qa.idx(d, c, u, v);
                    const double dr = qa.re[i] - qb.re[i];
                    const double di = qa.im[i] - qb.im[i];
                    s += dr * dr + di * di;
                }
                acc += std::sqrt(s);
            }
            hm[static_cast<std::size_t>(u) * cols + v] = acc / D;
        }
    }
    return hm;
}

std::vector<double> center_shift(const std::vector<double>& heatmap, int rows, int cols) {
    if (heatmap.size() != static_cast<std::size_t>(rows) * cols)
        throw shape_error("center_shift: heatmap size mismatch");
    std::vector<double> out(heatmap.size());
    const int su = rows / 2, sv = cols / 2;
    for (int u = 0; u < rows; ++u)
        for (int v = 0; v < cols; ++v)
            out[static_cast<std::size_t>((u + su) % rows) * cols + (v + sv) % cols] =
                heatmap[static_cast<std::size_t>(u) * cols + v];
    return out;
}

std::pair<double, double> heatmap_set_means(const std::vector<double>& heatmap,
                                            int rows, int cols,
                                            const FrequencySet& set) {
    if (heatmap.size() != static_cast<std::size_t>(rows) * cols)
        throw shape_error("heatmap_set_means: heatmap size mismatch");
    if (set.members.empty()) throw config_error("heatmap_set_means: empty frequency set");
    if (set.members.size() == heatmap.size())
        throw config_error("heatmap_set_means: set covers the whole grid");

    double in_sum = 0.0, out_sum = 0.0;
    std::size_t in_count = 0;
    std::vector<char> mark(heatmap.size(), 0);
    for (const auto& [u, v] : set.members) mark[static_cast<std::size_t>(u) * cols + v] = 1;
    for (std::size_t i = 0; i < heatmap.size(); ++i) {
        if (mark[i]) {
            in_sum += heatmap[i];
            ++in_count;
        } else {
            out_sum += heatmap[i];
        }
    }
    return {in_sum / static_cast<double>(in_count),
            out_sum / static_cast<double>(heatmap.size() - in_count)};
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<OutputMap> random_upstream(int filters, int rows, int cols, Rng& rng) {
    std::vector<OutputMap> u;
    u.reserve(filters);
    for (int d = 0; d < filters; ++d) {
        OutputMap m(rows, cols);
        for (double& v : m.data) v = rng.symmetric(1.0);
        u.push_back(std::move(m));
    }
    return u;
}

double forward_identity_deviation(const FilterBank& bank, const FeatureTensor& x) {
    const int M = x.rows, N = x.cols;
    const std::vector<OutputMap> y = conv_forward(bank, x);
    const SpectrumTensor fx = dft2(x);
    const FilterSpectrum fw = filter_transform(bank, M, N);
    double dev = 0.0;
    for (int d = 0; d < bank.filters; ++d) {
        const SpectrumTensor h = dft2(y[d]);
        for (int u = 0; u < M; ++u) {
            for (int v = 0; v < N; ++v) {
                std::complex<double> pred{0.0, 0.0};
                for (int c = 0; c < bank.channels; ++c)
                    pred += fw.at(d, c, u, v) * fx.at(c, u, v);
                if (kronecker_delta(u, v))
                    pred += static_cast<double>(M) * N * bank.biases[d];
                dev = std::max(dev, std::abs(h.at(0, u, v) - pred));
            }
        }
    }
    return dev;
}

double prediction_deviation(const FilterBank& bank, const FeatureTensor& x,
                            const std::vector<OutputMap>& upstream, double eta) {
    std::vector<SpectrumTensor> ps;
    ps.reserve(upstream.size());
    for (const OutputMap& u : upstream) ps.push_back(loss_spectrum(u));
    const DeltaSpectrum pred = predict_delta(bank, dft2(x), ps, eta);

    GradientBundle grads = conv_backward(bank, x, upstream, false);
    const FilterBank after = sgd_step(bank, grads, SgdConfig{eta, 1});
    const FilterSpectrum qb = filter_transform(bank, x.rows, x.cols);
    const FilterSpectrum qa = filter_transform(after, x.rows, x.cols);

    double dev = 0.0;
    for (std::size_t i = 0; i < qa.re.size(); ++i) {
        const double dr = (qa.re[i] - qb.re[i]) - pred.re[i];
        const double di = (qa.im[i] - qb.im[i]) - pred.im[i];
        dev = std::max(dev, std::hypot(dr, di));
    }
    return dev;
}

} // namespace

std::vector<VerifierResult> run_verifier_suite(std::uint64_t seed) {
    std::vector<VerifierResult> results;
    Rng root(seed);
    const int geoms[2][2] = {{9, 9}, {8, 12}};
    const int chans[3] = {1, 2, 4};

    {
        double dev = 0.0;
        for (int i = 0; i < 18; ++i) {
            const int C = chans[i % 3];
            const int M = geoms[i % 2][0], N = geoms[i % 2][1];
            const FilterBank bank = seeded_random_bank(2, C, 3, root.bits());
            const FeatureTensor x = seeded_random_tensor(C, M, N, root.bits());
            dev = std::max(dev, forward_identity_deviation(bank, x));
        }
        results.push_back({"forward spectral product identity", dev, 1e-9, dev <= 1e-9});
    }
    {
        double dev = 0.0;
        for (int i = 0; i < 8; ++i) {
            const int C = chans[i % 3];
            const int M = geoms[i % 2][0], N = geoms[i % 2][1];
            const FilterBank bank = seeded_random_bank(2, C, 3, root.bits());
            const FeatureTensor x = seeded_random_tensor(C, M, N, root.bits());
            Rng sub = root.fork(1000 + i);
            const auto upstream = random_upstream(bank.filters, M, N, sub);
            dev = std::max(dev, prediction_deviation(bank, x, upstream, 0.05));
        }
        results.push_back({"single-step spectral change prediction", dev, 1e-9, dev <= 1e-9});
    }
    {
        double dev = 0.0;
        for (int i = 0; i < 8; ++i) {
            const int M = geoms[i % 2][0], N = geoms[i % 2][1];
            const FilterBank bank = seeded_random_bank(3, 2, 3, root.bits());
            const FeatureTensor x = seeded_random_tensor(2, M, N, root.bits());
            Rng sub = root.fork(2000 + i);
            const auto upstream = random_upstream(bank.filters, M, N, sub);
            dev = std::max(dev, verify_step_equivalence(bank, x, upstream, 0.05).max_deviation);
        }
        results.push_back({"weight step vs spectral step scaling", dev, 1e-9, dev <= 1e-9});
    }
    {
        // DC-only input: stable frequencies must not move over many steps.
        const int M = 9, N = 9;
        FeatureTensor x(2, M, N);
        for (int c = 0; c < 2; ++c)
            for (int m = 0; m < M; ++m)
                for (int n = 0; n < N; ++n) x.at(c, m, n) = 0.6 + 0.3 * c;
        FilterBank bank = seeded_random_bank(3, 2, 3, root.bits());
        const FilterSpectrum q0 = filter_transform(bank, M, N);
        Rng sub = root.fork(3000);
        for (int step = 0; step < 50; ++step) {
            const auto upstream = random_upstream(bank.filters, M, N, sub);
            bank = sgd_step(bank, conv_backward(bank, x, upstream, false), SgdConfig{0.02, 1});
        }
        const FilterSpectrum q1 = filter_transform(bank, M, N);
        const FrequencySet s = stable_set_exact(M, N, 3);
        double dev = 0.0;
        for (const auto& [u, v] : s.members) {
            for (int d = 0; d < bank.filters; ++d) {
                for (int c = 0; c < bank.channels; ++c) {
                    const std::size_t i = q0.idx(d, c, u, v);
                    dev = std::max(dev, std::hypot(q1.re[i] - q0.re[i], q1.im[i] - q0.im[i]));
                }
            }
        }
        results.push_back({"stable-set invariance under DC-only input", dev, 1e-10, dev <= 1e-10});
    }
    {
        double dev = 0.0;
        for (int n = 1; n <= 16; ++n) {
            for (int j = 0; j < 30; ++j) {
                const double theta = (j < 24) ? -6.2 + 12.4 * j / 23.0
                                              : kTwoPi * (j - 27) / n;  // singular candidates
                std::complex<double> brute{0.0, 0.0};
                for (int t = 0; t < n; ++t)
                    brute += std::complex<double>(std::cos(t * theta), std::sin(t * theta));
                dev = std::max(dev, std::abs(geometric_phase_sum(n, theta) - brute));
            }
        }
        results.push_back({"closed-form phase sum vs direct summation", dev, 1e-13, dev <= 1e-13});
    }
    {
        double dev = 0.0;
        for (int i = 0; i < 10; ++i) {
            const FeatureTensor x = seeded_random_tensor(2, 9, 11, root.bits());
            const SpectrumTensor g = dft2(x);
            double es = 0.0, eg = 0.0;
            for (double v : x.data) es += v * v;
            for (std::size_t j = 0; j < g.re.size(); ++j)
                eg += g.re[j] * g.re[j] + g.im[j] * g.im[j];
            dev = std::max(dev, std::abs(es - eg / (9.0 * 11.0)) / es);
        }
        results.push_back({"energy conservation across dft2", dev, 1e-10, dev <= 1e-10});
    }
    {
        // The kernel transform must be the conjugate of the padded transform.
        double dev = 0.0;
        for (int i = 0; i < 10; ++i) {
            const int M = 9, N = 8;
            const FilterBank bank = seeded_random_bank(1, 1, 3, root.bits());
            FeatureTensor padded(1, M, N);
            for (int t = 0; t < 3; ++t)
                for (int s = 0; s < 3; ++s) padded.at(0, t, s) = bank.w(0, 0, t, s);
            const SpectrumTensor g = dft2(padded);
            const FilterSpectrum q = filter_transform(bank, M, N);
            for (int u = 0; u < M; ++u)
                for (int v = 0; v < N; ++v)
                    dev = std::max(dev,
                                   std::abs(std::conj(g.at(0, u, v)) - q.at(0, 0, u, v)));
        }
        results.push_back({"kernel transform vs padded transform conjugate", dev, 1e-11, dev <= 1e-11});
    }
    return results;
}

} // namespace fwm
