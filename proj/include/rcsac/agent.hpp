#pragma once

#include <array>
#include <vector>

#include "rcsac/env.hpp"
#include "rcsac/gaussian.hpp"
#include "rcsac/mlp.hpp"
#include "rcsac/replay.hpp"
#include "rcsac/rng.hpp"

namespace rcsac {

struct AgentConfig {
    int hidden_dim = 256;
    double alpha = 0.2;       // entropy temperature (fixed)
    double gamma = 0.99;      // reward discount
    double tau = 0.005;       // Polyak rate for all target nets
    double lr = 3e-4;         // shared Adam learning rate
    double lambda_er = 10.0;  // risk penalty coefficient
    // The risk bound enters the critics as an input, not just the policy.
    // Setting this false restores the literal Q(s, a) form for ablation.
    bool delta_in_critics = true;
};

struct UpdateDiagnostics {
    double q1_loss = 0, q2_loss = 0, risk_loss = 0, policy_loss = 0;
    double mean_q = 0;     // batch mean of min(q1, q2) at stored (s, a)
    double mean_risk = 0;  // batch mean of the risk critic at stored (s, a)
    bool skipped = false;
    bool finite() const;
};

using NoiseRow = std::array<double, kActionDim>;

// Risk-conditioned SAC agent: squashed-Gaussian policy, twin soft-Q critics
// with targets, sigmoid risk critic with target, one Adam state per trained
// net. Owned by a single training thread.
class Agent {
public:
    Agent(const MazeSpec& spec, const AgentConfig& cfg, RngStream& init_rng);

    const AgentConfig& config() const { return cfg_; }
    const MazeSpec& spec() const { return spec_; }
    int state_dim() const { return state_dim_; }

    // Evaluation-mode (deterministic) action is tanh(mean).
    Action select_action(const AgentState& s, double delta, bool stochastic,
                         RngStream& rng) const;

    // Deterministic loss cores: the per-item standard-normal draws are
    // supplied explicitly so both Adam updates and finite-difference checks
    // see the exact same sample path.
    //
    // Soft Bellman residual for both Q critics. Targets bootstrap through
    // min of the target critics at a fresh next action, minus the entropy
    // term; done transitions cut the bootstrap.
    void q_loss(const std::vector<const Transition*>& batch,
                const std::vector<NoiseRow>& next_noise, Grads& g1, Grads& g2,
                UpdateDiagnostics& diag) const;

    // L2 regression of the risk critic on r_b + (1 - r_b) * bootstrap.
    void risk_critic_loss(const std::vector<const Transition*>& batch,
                          const std::vector<NoiseRow>& next_noise, Grads& gr,
                          UpdateDiagnostics& diag) const;

    // Reparameterized actor loss with the exceeded-risk penalty
    // lambda_er * ReLU(Q_er(s, a, delta) - delta). Critic parameters stay
    // frozen; gradients flow through the sampled action only.
    double policy_loss(const std::vector<const Transition*>& batch,
                       const std::vector<NoiseRow>& eps, Grads& gp) const;

    // One full update: Adam on q1, q2, risk, policy in that order, then
    // Polyak on the three target nets. Skips (with a flag) when the buffer
    // has fewer than batch_size items.
    UpdateDiagnostics update_step(const ReplayBuffer& buffer, int batch_size,
                                  RngStream& sample_rng, RngStream& noise_rng);

    GaussianHead policy_head(const AgentState& s, double delta) const;

    // Most recently sampled batch (for the NaN diagnostic dump).
    const std::vector<const Transition*>& last_batch() const { return batch_; }

    // Exposed for checkpointing and tests.
    Mlp policy, q1, q2, q1_target, q2_target, risk, risk_target;
    AdamState opt_policy, opt_q1, opt_q2, opt_risk;

    int critic_input_dim() const { return critic_in_; }
    int policy_input_dim() const { return policy_in_; }

private:
    void policy_input(const AgentState& s, double delta, std::vector<double>& out) const;
    void critic_input(const AgentState& s, std::span<const double> action, double delta,
                      std::vector<double>& out) const;

    MazeSpec spec_;
    AgentConfig cfg_;
    int state_dim_ = 0;
    int policy_in_ = 0;
    int critic_in_ = 0;

    // Scratch buffers for update_step.
    mutable Grads g1_, g2_, gr_, gp_;
    mutable std::vector<const Transition*> batch_;
    mutable std::vector<NoiseRow> noise_a_, noise_b_;
};

}  // namespace rcsac
