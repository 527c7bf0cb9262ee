#include "rcsac/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rcsac {

namespace {

std::vector<Layer> zero_layers_like(const Mlp& net) {
    std::vector<Layer> ls;
    ls.reserve(net.layers.size());
    for (const Layer& l : net.layers) {
        Layer z;
        z.in = l.in;
        z.out = l.out;
        z.w.assign(l.w.size(), 0.0);
        z.b.assign(l.b.size(), 0.0);
        ls.push_back(std::move(z));
    }
    return ls;
}

void check_dims(const Mlp& net, std::size_t input_size) {
    if (net.layers.empty()) throw std::invalid_argument("mlp: no layers");
    if (static_cast<int>(input_size) != net.layers.front().in)
        throw std::invalid_argument("mlp: input size " + std::to_string(input_size) +
                                    " does not match first layer in=" +
                                    std::to_string(net.layers.front().in));
}

}  // namespace

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.w.size() + l.b.size();
    return n;
}

Mlp make_mlp(int in, int hidden, int out, OutputActivation act, RngStream& rng) {
    Mlp net;
    net.out_act = act;
    const int dims[4] = {in, hidden, hidden, out};
    for (int l = 0; l < 3; ++l) {
        Layer layer;
        layer.in = dims[l];
        layer.out = dims[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        layer.w.resize(static_cast<std::size_t>(layer.out) * layer.in);
        layer.b.resize(layer.out);
        for (double& w : layer.w) w = rng.uniform(-bound, bound);
        for (double& b : layer.b) b = rng.uniform(-bound, bound);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

const std::vector<double>& mlp_forward_cached(const Mlp& net, std::span<const double> input,
                                              ForwardCache& cache) {
    check_dims(net, input.size());
    const std::size_t L = net.layers.size();
    cache.x.resize(L);
    cache.z.resize(L);

    cache.x[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < L; ++l) {
        const Layer& layer = net.layers[l];
        const std::vector<double>& x = cache.x[l];
        std::vector<double>& z = cache.z[l];
        z.resize(layer.out);
        for (int o = 0; o < layer.out; ++o) {
            const double* wrow = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            double acc = layer.b[o];
            for (int i = 0; i < layer.in; ++i) acc += wrow[i] * x[i];
            z[o] = acc;
        }
        if (l + 1 < L) {
            std::vector<double>& nx = cache.x[l + 1];
            nx.resize(layer.out);
            for (int o = 0; o < layer.out; ++o) nx[o] = z[o] > 0.0 ? z[o] : 0.0;
        }
    }

    const std::vector<double>& zl = cache.z[L - 1];
    cache.y.resize(zl.size());
    if (net.out_act == OutputActivation::sigmoid) {
        for (std::size_t i = 0; i < zl.size(); ++i) cache.y[i] = 1.0 / (1.0 + std::exp(-zl[i]));
    } else {
        cache.y = zl;
    }
    return cache.y;
}

void mlp_forward(const Mlp& net, std::span<const double> input, std::vector<double>& out) {
    thread_local ForwardCache cache;
    out = mlp_forward_cached(net, input, cache);
}

Grads Grads::like(const Mlp& net) {
    Grads g;
    g.layers = zero_layers_like(net);
    return g;
}

void Grads::zero() {
    for (Layer& l : layers) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
}

void Grads::scale(double s) {
    for (Layer& l : layers) {
        for (double& w : l.w) w *= s;
        for (double& b : l.b) b *= s;
    }
}

void mlp_backward(const Mlp& net, const ForwardCache& cache, std::span<const double> upstream,
                  Grads* grads, std::vector<double>* input_grad) {
    const std::size_t L = net.layers.size();
    if (upstream.size() != static_cast<std::size_t>(net.output_dim()))
        throw std::invalid_argument("mlp_backward: upstream size mismatch");
    if (grads && grads->layers.size() != L)
        throw std::invalid_argument("mlp_backward: grads shape mismatch");

    // dL/dz for the current layer, walking backwards.
    std::vector<double> delta(upstream.begin(), upstream.end());
    if (net.out_act == OutputActivation::sigmoid) {
        for (std::size_t i = 0; i < delta.size(); ++i) {
            const double y = cache.y[i];
            delta[i] *= y * (1.0 - y);
        }
    }

    std::vector<double> prev;
    for (std::size_t l = L; l-- > 0;) {
        const Layer& layer = net.layers[l];
        const std::vector<double>& x = cache.x[l];
        if (grads) {
            Layer& g = grads->layers[l];
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                double* grow = g.w.data() + static_cast<std::size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) grow[i] += d * x[i];
                g.b[o] += d;
            }
        }
        const bool need_input = (l > 0) || (input_grad != nullptr);
        if (!need_input) break;

        prev.assign(layer.in, 0.0);
        for (int o = 0; o < layer.out; ++o) {
            const double d = delta[o];
            if (d == 0.0) continue;
            const double* wrow = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) prev[i] += d * wrow[i];
        }
        if (l > 0) {
            // ReLU mask of the previous layer's pre-activation.
            const std::vector<double>& zprev = cache.z[l - 1];
            for (std::size_t i = 0; i < prev.size(); ++i)
                if (zprev[i] <= 0.0) prev[i] = 0.0;
        }
        delta.swap(prev);
    }
    if (input_grad) *input_grad = delta;
}

AdamState AdamState::like(const Mlp& net) {
    AdamState st;
    st.m = zero_layers_like(net);
    st.v = zero_layers_like(net);
    return st;
}

void adam_step(Mlp& params, const Grads& grads, AdamState& state, double lr) {
    state.t += 1;
    const double b1 = state.beta1, b2 = state.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto update = [&](std::vector<double>& p, const std::vector<double>& g,
                          std::vector<double>& m, std::vector<double>& v) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                const double mhat = m[i] / corr1;
                const double vhat = v[i] / corr2;
                p[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
            }
        };
        update(params.layers[l].w, grads.layers[l].w, state.m[l].w, state.v[l].w);
        update(params.layers[l].b, grads.layers[l].b, state.m[l].b, state.v[l].b);
    }
}

void polyak_update(Mlp& target, const Mlp& source, double tau) {
    for (std::size_t l = 0; l < target.layers.size(); ++l) {
        auto blend = [tau](std::vector<double>& t, const std::vector<double>& s) {
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = (1.0 - tau) * t[i] + tau * s[i];
        };
        blend(target.layers[l].w, source.layers[l].w);
        blend(target.layers[l].b, source.layers[l].b);
    }
}

}  // namespace rcsac
