#pragma once

#include <vector>

#include "fwm/tensor.hpp"

namespace fwm {

/// Exact analytic gradients of a scalar loss through one circular
/// convolution layer, given the upstream map dLoss/dY per filter.
struct GradientBundle {
    std::vector<double> d_weights;        // (d, c, t, s), matches FilterBank layout
    std::vector<double> d_biases;         // (d)
    FeatureTensor d_input;                // C x M x N; empty unless requested
    std::vector<OutputMap> upstream;      // the dLoss/dY maps these came from
};

struct SgdConfig {
    double eta = 0.0;
    int steps = 1;
};

/// Circular-padding, stride-1 correlation:
/// Y_d(m,n) = b_d + sum_{c,t,s} W_d(c,t,s) X(c, (m+t) mod M, (n+s) mod N).
/// Output maps keep the input's spatial size.
std::vector<OutputMap> conv_forward(const FilterBank& bank, const FeatureTensor& x);

/// Gradients w.r.t. weights, biases and (optionally) the input. The upstream
/// maps are taken by value and kept in the bundle.
GradientBundle conv_backward(const FilterBank& bank, const FeatureTensor& x,
                             std::vector<OutputMap> upstream,
                             bool want_input_grad = true);

/// One descent step W' = W - eta * dW, b' = b - eta * db. Pure.
FilterBank sgd_step(const FilterBank& bank, const GradientBundle& grads,
                    const SgdConfig& cfg);

} // namespace fwm
