#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcsac/rng.hpp"

namespace rcsac {

enum class OutputActivation { linear, sigmoid };

// Weights are row-major [out x in]; hidden activation is ReLU everywhere.
struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w;
    std::vector<double> b;
};

struct Mlp {
    std::vector<Layer> layers;
    OutputActivation out_act = OutputActivation::linear;

    int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out; }
    std::size_t param_count() const;
};

// 2 hidden layers of width `hidden`, uniform +-1/sqrt(fan_in) init on
// weights and biases.
Mlp make_mlp(int in, int hidden, int out, OutputActivation act, RngStream& rng);

// Per-layer inputs and pre-activations kept for the backward pass.
// Reusable across calls; resized on first use.
struct ForwardCache {
    std::vector<std::vector<double>> x;  // x[l] = input to layer l
    std::vector<std::vector<double>> z;  // z[l] = pre-activation of layer l
    std::vector<double> y;               // output after the output activation
};

void mlp_forward(const Mlp& net, std::span<const double> input, std::vector<double>& out);
const std::vector<double>& mlp_forward_cached(const Mlp& net, std::span<const double> input,
                                              ForwardCache& cache);

// Gradient holder mirroring the parameter shapes.
struct Grads {
    std::vector<Layer> layers;
    static Grads like(const Mlp& net);
    void zero();
    void scale(double s);
};

// Backward pass for <upstream, output>. `upstream` is dL/dy taken w.r.t. the
// post-activation output. Accumulates into `grads` when non-null; writes
// dL/dinput when `input_grad` is non-null.
void mlp_backward(const Mlp& net, const ForwardCache& cache, std::span<const double> upstream,
                  Grads* grads, std::vector<double>* input_grad);

struct AdamState {
    std::vector<Layer> m;
    std::vector<Layer> v;
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    static AdamState like(const Mlp& net);
};

void adam_step(Mlp& params, const Grads& grads, AdamState& state, double lr);

// target <- (1 - tau) * target + tau * source, elementwise.
void polyak_update(Mlp& target, const Mlp& source, double tau);

}  // namespace rcsac
