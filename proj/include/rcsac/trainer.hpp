#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcsac/agent.hpp"
#include "rcsac/checkpoint.hpp"
#include "rcsac/config.hpp"
#include "rcsac/risk.hpp"

namespace rcsac {

// Raised when a loss goes non-finite; the offending batch has already been
// dumped next to the log when this is thrown.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One evaluation rollout: states s_0..s_T with the per-state immediate
// risks, actions a_0..a_{T-1}, rewards, and trajectory totals.
struct EpisodeTrace {
    std::vector<AgentState> states;
    std::vector<Action> actions;
    std::vector<double> rewards;
    std::vector<double> r_b;
    double delta = 0.0;
    DoneReason done_reason = DoneReason::none;
    int steps = 0;
    double distance = 0.0;
    double exec_risk = 0.0;  // exact recursion over r_b
};

struct EvalRow {
    double delta = 0.0;
    double mean_steps = 0.0;
    double mean_distance = 0.0;
    double goal_rate = 0.0;
    double exec_risk_mean = 0.0;
    double exec_risk_std = 0.0;
    double time_s = 0.0;  // mean policy-inference wall clock per episode
};

struct TrainResult {
    std::filesystem::path checkpoint_path;
    std::filesystem::path log_path;
    int epochs_run = 0;
};

// Observer invoked after every stored environment step; global_step is the
// 0-based index that also names the risk-MC substream for that step.
using StepObserver = std::function<void(long global_step, const Transition& t)>;

// Named substreams of the master seed (see SeedRegistry): "init", "env",
// "policy", "buffer", "risk-mc" (per-step index), "eval", "delta".
SeedRegistry seed_everything(std::uint64_t master_seed);

// Alg.-1-style loop: epochs x (env steps with per-episode Delta draws and
// 500-sample risk labels, then gradient steps). Writes checkpoint.json,
// log.csv and resolved.toml under out_dir.
TrainResult train(const TrainConfig& cfg, const MazeSpec& spec,
                  const std::filesystem::path& out_dir, const StepObserver& observer = {});

// Deterministic-policy evaluation at each Delta. `risk_rollouts` rollouts
// feed the execution-risk estimate; one representative trace per Delta is
// appended to `traces` when non-null.
std::vector<EvalRow> evaluate(const Agent& agent, const MazeSpec& spec,
                              std::span<const double> deltas, int episodes_per_delta,
                              int risk_rollouts, int risk_mc_samples, double sigma,
                              std::uint64_t eval_seed, std::vector<EpisodeTrace>* traces,
                              bool measure_time);

// Single deterministic rollout with per-state risk labels (shared by
// evaluate and the trace writer).
EpisodeTrace rollout_trace(const Agent& agent, const MazeSpec& spec, double delta,
                           int risk_mc_samples, double sigma, RngStream& rng,
                           double* inference_seconds = nullptr);

}  // namespace rcsac
