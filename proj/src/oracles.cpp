#include "rcsac/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace rcsac {

std::vector<double> reference_mlp_eval(const Mlp& net, std::span<const double> input) {
    std::vector<double> cur(input.begin(), input.end());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        std::vector<double> next(layer.out, 0.0);
        for (int o = 0; o < layer.out; ++o) {
            double acc = layer.b[o];
            for (int i = 0; i < layer.in; ++i)
                acc += layer.w[static_cast<std::size_t>(o) * layer.in + i] * cur[i];
            next[o] = acc;
        }
        const bool last = (l + 1 == net.layers.size());
        if (!last) {
            for (double& v : next)
                if (v < 0.0) v = 0.0;
        } else if (net.out_act == OutputActivation::sigmoid) {
            for (double& v : next) v = 1.0 / (1.0 + std::exp(-v));
        }
        cur = std::move(next);
    }
    return cur;
}

double bernoulli_any_event_prob(std::span<const double> risks) {
    const std::size_t T = risks.size();
    if (T > 24) throw std::invalid_argument("bernoulli enumeration limited to T <= 24");
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << T); ++mask) {
        double p = 1.0;
        bool any = false;
        for (std::size_t t = 0; t < T; ++t) {
            if (mask & (1ULL << t)) {
                p *= risks[t];
                any = true;
            } else {
                p *= 1.0 - risks[t];
            }
        }
        if (any) total += p;
    }
    return total;
}

double analytic_rect_prob(const Rect& r, double cx, double cy, double sigma) {
    if (sigma <= 0.0) return r.contains(cx, cy) ? 1.0 : 0.0;
    auto cdf = [](double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); };
    const double px = cdf((r.x_max - cx) / sigma) - cdf((r.x_min - cx) / sigma);
    const double py = cdf((r.y_max - cy) / sigma) - cdf((r.y_min - cy) / sigma);
    return px * py;
}

std::vector<double*> mlp_param_refs(Mlp& net) {
    std::vector<double*> refs;
    for (Layer& l : net.layers) {
        for (double& w : l.w) refs.push_back(&w);
        for (double& b : l.b) refs.push_back(&b);
    }
    return refs;
}

std::vector<double> grads_flat(const Grads& g) {
    std::vector<double> flat;
    for (const Layer& l : g.layers) {
        flat.insert(flat.end(), l.w.begin(), l.w.end());
        flat.insert(flat.end(), l.b.begin(), l.b.end());
    }
    return flat;
}

std::vector<double> finite_difference_grad(Mlp& net, const std::function<double()>& loss,
                                           double h) {
    std::vector<double*> refs = mlp_param_refs(net);
    std::vector<double> grad(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const double orig = *refs[i];
        *refs[i] = orig + h;
        const double fp = loss();
        *refs[i] = orig - h;
        const double fm = loss();
        *refs[i] = orig;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

double max_rel_err(std::span<const double> analytic, std::span<const double> numeric) {
    if (analytic.size() != numeric.size())
        throw std::invalid_argument("max_rel_err: size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double denom = std::max({1.0, std::fabs(analytic[i]), std::fabs(numeric[i])});
        worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / denom);
    }
    return worst;
}

}  // namespace rcsac
