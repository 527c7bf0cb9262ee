#pragma once

#include <span>
#include <vector>

namespace rcsac {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
// Keeps the tanh log-det correction away from log(0) at saturation.
inline constexpr double kTanhCorrectionEps = 1e-6;

// Diagonal Gaussian over pre-squash space. log_std is clamped at
// construction; raw values are kept so gradients can be masked at the
// clamp boundary.
struct GaussianHead {
    std::vector<double> mean;
    std::vector<double> log_std;      // clamped to [kLogStdMin, kLogStdMax]
    std::vector<double> raw_log_std;  // pre-clamp network output

    static GaussianHead from_net_output(std::span<const double> out);  // [mean; log_std]
};

struct SquashedSample {
    std::vector<double> action;    // tanh(u), strictly inside (-1, 1)^d
    std::vector<double> pre_tanh;  // u = mean + exp(log_std) * noise
    double log_prob = 0.0;
};

// Deterministic given `noise` (standard-normal draw supplied by the caller).
// log_prob = sum_i [ N(u_i; mean_i, std_i) in log space ] - sum_i log(1 - tanh(u_i)^2 + eps).
SquashedSample sample_squashed_gaussian(const GaussianHead& head, std::span<const double> noise);

}  // namespace rcsac
