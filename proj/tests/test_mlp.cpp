#include <doctest.h>

#include <cmath>

#include "rcsac/mlp.hpp"
#include "rcsac/oracles.hpp"

using namespace rcsac;

namespace {

Mlp constant_output_net(int in, int out, double bias_value) {
    RngStream rng(1);
    Mlp net = make_mlp(in, 4, out, OutputActivation::linear, rng);
    for (Layer& l : net.layers) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
    std::fill(net.layers.back().b.begin(), net.layers.back().b.end(), bias_value);
    return net;
}

Mlp chain_1x1(double w) {
    Mlp net;
    for (int l = 0; l < 3; ++l) {
        Layer layer;
        layer.in = layer.out = 1;
        layer.w = {w};
        layer.b = {0.0};
        net.layers.push_back(layer);
    }
    return net;
}

}  // namespace

TEST_CASE("zero-weight net returns last-layer bias") {
    const Mlp net = constant_output_net(3, 2, 1.25);
    std::vector<double> out;
    mlp_forward(net, std::vector<double>{0.3, -2.0, 7.0}, out);
    CHECK(out == std::vector<double>{1.25, 1.25});
}

TEST_CASE("relu kills negative sign in identity chain") {
    const Mlp net = chain_1x1(1.0);
    std::vector<double> out;
    mlp_forward(net, std::vector<double>{-1.0}, out);
    CHECK(out[0] == 0.0);
    mlp_forward(net, std::vector<double>{2.0}, out);
    CHECK(out[0] == 2.0);
}

TEST_CASE("forward matches the straight-line reference evaluator") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
        RngStream rng(seed);
        const auto act = seed % 2 ? OutputActivation::sigmoid : OutputActivation::linear;
        const Mlp net = make_mlp(5, 16, 3, act, rng);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> x(5);
            for (double& v : x) v = rng.uniform(-3.0, 3.0);
            std::vector<double> got;
            mlp_forward(net, x, got);
            const std::vector<double> want = reference_mlp_eval(net, x);
            for (std::size_t i = 0; i < got.size(); ++i)
                CHECK(std::fabs(got[i] - want[i]) <= 1e-12);
        }
    }
}

TEST_CASE("sigmoid output stays in (0,1)") {
    RngStream rng(7);
    const Mlp net = make_mlp(2, 8, 1, OutputActivation::sigmoid, rng);
    std::vector<double> out;
    for (int rep = 0; rep < 100; ++rep) {
        mlp_forward(net, std::vector<double>{rng.uniform(-50, 50), rng.uniform(-50, 50)}, out);
        CHECK(out[0] > 0.0);
        CHECK(out[0] < 1.0);
    }
}

TEST_CASE("dimension mismatch throws") {
    RngStream rng(1);
    const Mlp net = make_mlp(3, 4, 1, OutputActivation::linear, rng);
    std::vector<double> out;
    CHECK_THROWS_AS(mlp_forward(net, std::vector<double>{1.0, 2.0}, out),
                    std::invalid_argument);
}

TEST_CASE("zero upstream gives zero gradients") {
    RngStream rng(11);
    const Mlp net = make_mlp(3, 8, 2, OutputActivation::linear, rng);
    ForwardCache cache;
    mlp_forward_cached(net, std::vector<double>{0.5, -0.5, 1.0}, cache);
    Grads g = Grads::like(net);
    mlp_backward(net, cache, std::vector<double>{0.0, 0.0}, &g, nullptr);
    for (const Layer& l : g.layers) {
        for (double w : l.w) CHECK(w == 0.0);
        for (double b : l.b) CHECK(b == 0.0);
    }
}

TEST_CASE("single affine layer: weight grad = input, bias grad = 1") {
    Mlp net;
    Layer l;
    l.in = 3;
    l.out = 1;
    l.w = {0.2, -0.4, 0.6};
    l.b = {0.1};
    net.layers.push_back(l);

    ForwardCache cache;
    const std::vector<double> x{1.5, -2.5, 0.5};
    mlp_forward_cached(net, x, cache);
    Grads g = Grads::like(net);
    mlp_backward(net, cache, std::vector<double>{1.0}, &g, nullptr);
    CHECK(g.layers[0].w == x);
    CHECK(g.layers[0].b == std::vector<double>{1.0});
}

TEST_CASE("backward matches finite differences") {
    for (std::uint64_t seed : {21ULL, 22ULL, 23ULL}) {
        RngStream rng(seed);
        const auto act = seed % 2 ? OutputActivation::sigmoid : OutputActivation::linear;
        Mlp net = make_mlp(4, 8, 2, act, rng);
        std::vector<double> x(4), up(2);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        for (double& v : up) v = rng.uniform(-1.0, 1.0);

        ForwardCache cache;
        mlp_forward_cached(net, x, cache);
        Grads g = Grads::like(net);
        mlp_backward(net, cache, up, &g, nullptr);

        auto loss = [&] {
            std::vector<double> out;
            mlp_forward(net, x, out);
            return up[0] * out[0] + up[1] * out[1];
        };
        const std::vector<double> fd = finite_difference_grad(net, loss);
        CHECK(max_rel_err(grads_flat(g), fd) <= 1e-4);
    }
}

TEST_CASE("input gradient matches finite differences") {
    RngStream rng(31);
    Mlp net = make_mlp(3, 8, 2, OutputActivation::linear, rng);
    std::vector<double> x{0.4, -0.2, 0.9};
    const std::vector<double> up{0.7, -1.3};

    ForwardCache cache;
    mlp_forward_cached(net, x, cache);
    std::vector<double> dx;
    mlp_backward(net, cache, up, nullptr, &dx);

    const double h = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> out;
        const double orig = x[i];
        x[i] = orig + h;
        mlp_forward(net, x, out);
        const double fp = up[0] * out[0] + up[1] * out[1];
        x[i] = orig - h;
        mlp_forward(net, x, out);
        const double fm = up[0] * out[0] + up[1] * out[1];
        x[i] = orig;
        CHECK(std::fabs(dx[i] - (fp - fm) / (2 * h)) <= 1e-5);
    }
}

TEST_CASE("adam: zero grads leave params unchanged, t increments") {
    RngStream rng(41);
    Mlp net = make_mlp(2, 4, 1, OutputActivation::linear, rng);
    const Mlp before = net;
    AdamState st = AdamState::like(net);
    Grads g = Grads::like(net);
    adam_step(net, g, st, 3e-4);
    CHECK(st.t == 1);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(net.layers[l].w == before.layers[l].w);
        CHECK(net.layers[l].b == before.layers[l].b);
    }
}

TEST_CASE("adam: one step from zero state moves by lr*g/(|g|+eps)") {
    Mlp net;
    Layer l;
    l.in = 1;
    l.out = 1;
    l.w = {0.5};
    l.b = {0.0};
    net.layers.push_back(l);
    AdamState st = AdamState::like(net);
    Grads g = Grads::like(net);
    const double grad = -3.7, lr = 0.01;
    g.layers[0].w[0] = grad;

    adam_step(net, g, st, lr);
    // Hand evaluation: mhat = g, vhat = g^2, update = lr*g/(|g| + eps).
    const double expected = 0.5 - lr * grad / (std::fabs(grad) + st.eps);
    CHECK(net.layers[0].w[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::fabs(net.layers[0].w[0] - (0.5 + lr)) < 1e-6);  // ~ -lr*sign(g)
}

TEST_CASE("adam: constant gradient step size approaches lr") {
    Mlp net;
    Layer l;
    l.in = 1;
    l.out = 1;
    l.w = {0.0};
    l.b = {0.0};
    net.layers.push_back(l);
    AdamState st = AdamState::like(net);
    Grads g = Grads::like(net);
    g.layers[0].w[0] = 0.37;
    const double lr = 1e-3;
    double prev = 0.0;
    double step = 0.0;
    for (int i = 0; i < 500; ++i) {
        prev = net.layers[0].w[0];
        adam_step(net, g, st, lr);
        step = std::fabs(net.layers[0].w[0] - prev);
    }
    CHECK(step == doctest::Approx(lr).epsilon(1e-6));
}

TEST_CASE("adam never produces non-finite params from finite inputs") {
    RngStream rng(51);
    Mlp net = make_mlp(2, 4, 1, OutputActivation::linear, rng);
    AdamState st = AdamState::like(net);
    Grads g = Grads::like(net);
    const double magnitudes[] = {0.0, 1e-300, 1e-12, 1.0, 1e12, 1e150};
    for (double mag : magnitudes) {
        for (Layer& gl : g.layers) {
            for (double& w : gl.w) w = mag * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            for (double& b : gl.b) b = mag * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        }
        adam_step(net, g, st, 3e-4);
        for (const Layer& nl : net.layers) {
            for (double w : nl.w) CHECK(std::isfinite(w));
            for (double b : nl.b) CHECK(std::isfinite(b));
        }
    }
}

TEST_CASE("polyak endpoints and midpoint") {
    RngStream rng(61);
    const Mlp source = make_mlp(2, 4, 1, OutputActivation::linear, rng);
    Mlp target = make_mlp(2, 4, 1, OutputActivation::linear, rng);

    Mlp t1 = target;
    polyak_update(t1, source, 1.0);
    for (std::size_t l = 0; l < t1.layers.size(); ++l) CHECK(t1.layers[l].w == source.layers[l].w);

    Mlp t0 = target;
    polyak_update(t0, source, 0.0);
    for (std::size_t l = 0; l < t0.layers.size(); ++l) CHECK(t0.layers[l].w == target.layers[l].w);

    Mlp zero = constant_output_net(2, 1, 0.0);
    Mlp two = constant_output_net(2, 1, 2.0);
    polyak_update(zero, two, 0.5);
    CHECK(zero.layers.back().b[0] == 1.0);
}

TEST_CASE("polyak is a contraction toward source") {
    RngStream rng(71);
    const Mlp source = make_mlp(3, 6, 2, OutputActivation::linear, rng);
    Mlp target = make_mlp(3, 6, 2, OutputActivation::linear, rng);
    const double tau = 0.3;
    const Mlp before = target;
    polyak_update(target, source, tau);
    for (std::size_t l = 0; l < target.layers.size(); ++l) {
        for (std::size_t i = 0; i < target.layers[l].w.size(); ++i) {
            const double lhs = std::fabs(target.layers[l].w[i] - source.layers[l].w[i]);
            const double rhs = (1.0 - tau) * std::fabs(before.layers[l].w[i] - source.layers[l].w[i]);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}
