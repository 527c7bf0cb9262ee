#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rcsac/env.hpp"
#include "rcsac/maze.hpp"
#include "rcsac/rng.hpp"

namespace rcsac {

// Fraction of n_samples draws from N(position(s), sigma^2 I) that land in an
// obstacle. sigma = 0 degenerates to the indicator of the nominal point.
double immediate_risk_mc(const MazeSpec& spec, const AgentState& s, double sigma, int n_samples,
                         RngStream& rng);

// Backward recursion er_t = r_b_t + (1 - r_b_t) * er_{t+1}, er_T = r_b_T.
// Along a single trajectory this equals 1 - prod(1 - r_b_t).
// Throws std::domain_error if any entry is outside [0, 1].
double execution_risk_exact(std::span<const double> rb_seq);

// Step-wise sum (the conservative upper bound); reported unclamped.
double execution_risk_sum_approx(std::span<const double> rb_seq);

enum class ExecRiskMode {
    nominal_recursion,  // exact recursion over per-step MC immediate risks
    bernoulli_flags,    // one perturbed copy of each visited state per rollout
};

struct ExecRiskOptions {
    int n_rollouts = 500;
    int mc_samples_per_step = 500;  // nominal_recursion only
    double sigma = 1.0;
    ExecRiskMode mode = ExecRiskMode::nominal_recursion;
};

struct ExecRiskResult {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> per_rollout;
};

using PolicyFn = std::function<Action(const AgentState&, double delta)>;

// Deterministic-policy rollouts from the spec's start; every rollout uses an
// independent substream derived from `seed`, so results do not depend on
// rollout order.
ExecRiskResult policy_execution_risk_mc(const MazeSpec& spec, const PolicyFn& policy, double delta,
                                        const ExecRiskOptions& opts, std::uint64_t seed);

}  // namespace rcsac
