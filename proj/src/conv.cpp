#include "fwm/conv.hpp"

#include <algorithm>

#include "fwm/kernels.hpp"

namespace fwm {

namespace {

void check_geometry(const FilterBank& bank, const FeatureTensor& x) {
    if (bank.channels != x.channels)
        throw shape_error("conv: filter/input channel mismatch");
    if (x.rows < bank.ksize || x.cols < bank.ksize)
        throw shape_error("conv: input smaller than the kernel");
}

// y[n] += a * x[(n + s) mod N]: a left rotation split into two spans.
void axpy_rot_left(const kernels::KernelOps& k, double* y, double a,
                   const double* x, int N, int s) {
    k.axpy(y, a, x + s, static_cast<std::size_t>(N - s));
    k.axpy(y + (N - s), a, x, static_cast<std::size_t>(s));
}

// y[n] += a * x[(n - s) mod N]: the matching right rotation.
void axpy_rot_right(const kernels::KernelOps& k, double* y, double a,
                    const double* x, int N, int s) {
    k.axpy(y, a, x + (N - s), static_cast<std::size_t>(s));
    k.axpy(y + s, a, x, static_cast<std::size_t>(N - s));
}

// sum_n a[n] * b[(n + s) mod N]
double dot_rot_left(const kernels::KernelOps& k, const double* a,
                    const double* b, int N, int s) {
    return k.dot(a, b + s, static_cast<std::size_t>(N - s)) +
           k.dot(a + (N - s), b, static_cast<std::size_t>(s));
}

} // namespace

std::vector<OutputMap> conv_forward(const FilterBank& bank, const FeatureTensor& x) {
    check_geometry(bank, x);
    const auto& k = kernels::active();
    const int D = bank.filters, C = bank.channels, K = bank.ksize;
    const int M = x.rows, N = x.cols;

    std::vector<OutputMap> out;
    out.reserve(D);
    for (int d = 0; d < D; ++d) {
        OutputMap y(M, N);
        std::fill(y.data.begin(), y.data.end(), bank.biases[d]);
        for (int c = 0; c < C; ++c) {
            const double* xc = x.channel(c);
            for (int t = 0; t < K; ++t) {
                for (int s = 0; s < K; ++s) {
                    const double w = bank.w(d, c, t, s);
                    for (int m = 0; m < M; ++m) {
                        const double* xrow = xc + static_cast<std::size_t>((m + t) % M) * N;
                        axpy_rot_left(k, y.row(m), w, xrow, N, s);
                    }
                }
            }
        }
        out.push_back(std::move(y));
    }
    return out;
}

GradientBundle conv_backward(const FilterBank& bank, const FeatureTensor& x,
                             std::vector<OutputMap> upstream,
                             bool want_input_grad) {
    check_geometry(bank, x);
    if (static_cast<int>(upstream.size()) != bank.filters)
        throw shape_error("conv_backward: one upstream map per filter required");
    const auto& k = kernels::active();
    const int D = bank.filters, C = bank.channels, K = bank.ksize;
    const int M = x.rows, N = x.cols;
    for (const OutputMap& u : upstream)
        if (u.rows != M || u.cols != N)
            throw shape_error("conv_backward: upstream map shape mismatch");

    GradientBundle g;
    g.d_weights.assign(bank.weights.size(), 0.0);
    g.d_biases.assign(static_cast<std::size_t>(D), 0.0);
    g.upstream = std::move(upstream);

    for (int d = 0; d < D; ++d) {
        const OutputMap& u = g.upstream[d];
        g.d_biases[d] = k.sum(u.data.data(), u.data.size());
        for (int c = 0; c < C; ++c) {
            const double* xc = x.channel(c);
            for (int t = 0; t < K; ++t) {
                for (int s = 0; s < K; ++s) {
                    double acc = 0.0;
                    for (int m = 0; m < M; ++m) {
                        const double* xrow = xc + static_cast<std::size_t>((m + t) % M) * N;
                        acc += dot_rot_left(k, u.row(m), xrow, N, s);
                    }
                    g.d_weights[((static_cast<std::size_t>(d) * C + c) * K + t) * K + s] = acc;
                }
            }
        }
    }

    if (want_input_grad) {
        g.d_input = FeatureTensor(C, M, N);
        for (int d = 0; d < D; ++d) {
            const OutputMap& u = g.upstream[d];
            for (int c = 0; c < C; ++c) {
                double* dx = g.d_input.channel(c);
                for (int t = 0; t < K; ++t) {
                    for (int s = 0; s < K; ++s) {
                        const double w = bank.w(d, c, t, s);
                        for (int p = 0; p < M; ++p) {
                            const double* urow =
                                u.row(((p - t) % M + M) % M);
                            axpy_rot_right(k, dx + static_cast<std::size_t>(p) * N, w, urow, N, s);
                        }
                    }
                }
            }
        }
    }
    return g;
}

FilterBank sgd_step(const FilterBank& bank, const GradientBundle& grads,
                    const SgdConfig& cfg) {
    if (cfg.eta < 0.0) throw config_error("sgd_step: learning rate must be >= 0");
    if (grads.d_weights.size() != bank.weights.size() ||
        grads.d_biases.size() != bank.biases.size())
        throw shape_error("sgd_step: gradient/bank shape mismatch");
    FilterBank next = bank;
    const auto& k = kernels::active();
    k.axpy(next.weights.data(), -cfg.eta, grads.d_weights.data(), next.weights.size());
    k.axpy(next.biases.data(), -cfg.eta, grads.d_biases.data(), next.biases.size());
    return next;
}

} // namespace fwm
