#pragma once

#include <cstddef>
#include <cstdint>

namespace rcsac {

struct TrainConfig {
    int epochs = 200;
    int env_steps_per_epoch = 1000;
    int grad_steps_per_epoch = 1000;
    int batch_size = 256;
    double lr = 3e-4;
    double gamma = 0.99;
    double lambda_er = 10.0;
    double alpha = 0.2;
    double tau = 0.005;
    std::size_t buffer_capacity = 100000;
    double delta_lo = 0.0;   // per-episode bound draw Delta ~ U[delta_lo, delta_hi]
    double delta_hi = 1.0;
    int risk_mc_samples = 500;  // samples per immediate-risk label
    int eval_interval = 10;     // epochs between periodic evaluations
    int eval_episodes = 20;
    double eval_delta = 0.2;    // bound used by the periodic evaluation
    std::uint64_t seed = 1;
    int hidden_dim = 256;
    int warmup_steps = 1000;  // uniform random actions before the policy is used
    bool delta_in_critics = true;
    // When false (default) the wall-clock columns in log.csv/sweep.csv are
    // written as 0 so seeded runs are byte-identical; stdout always shows
    // measured times.
    bool timing = false;

    void validate() const;  // throws ConfigError
};

}  // namespace rcsac
