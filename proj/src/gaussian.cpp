#include "rcsac/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcsac {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))
// tanh rounds to exactly +-1.0 once |u| > ~19; keep actions strictly interior.
constexpr double kInteriorMax = 1.0 - 1e-12;
}

GaussianHead GaussianHead::from_net_output(std::span<const double> out) {
    if (out.size() % 2 != 0) throw std::invalid_argument("gaussian head: odd output size");
    const std::size_t d = out.size() / 2;
    GaussianHead h;
    h.mean.assign(out.begin(), out.begin() + d);
    h.raw_log_std.assign(out.begin() + d, out.end());
    h.log_std.resize(d);
    for (std::size_t i = 0; i < d; ++i)
        h.log_std[i] = std::clamp(h.raw_log_std[i], kLogStdMin, kLogStdMax);
    return h;
}

SquashedSample sample_squashed_gaussian(const GaussianHead& head, std::span<const double> noise) {
    const std::size_t d = head.mean.size();
    if (noise.size() != d) throw std::invalid_argument("squashed gaussian: noise size mismatch");
    SquashedSample s;
    s.action.resize(d);
    s.pre_tanh.resize(d);
    double logp = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double std_i = std::exp(head.log_std[i]);
        const double u = head.mean[i] + std_i * noise[i];
        const double t = std::tanh(u);
        s.pre_tanh[i] = u;
        s.action[i] = std::clamp(t, -kInteriorMax, kInteriorMax);
        logp += -head.log_std[i] - 0.5 * noise[i] * noise[i] - kLogSqrt2Pi;
        logp -= std::log(1.0 - t * t + kTanhCorrectionEps);
    }
    s.log_prob = logp;
    return s;
}

}  // namespace rcsac
