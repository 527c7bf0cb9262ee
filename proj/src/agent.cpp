#include "rcsac/agent.hpp"

#include <cmath>
#include <stdexcept>

namespace rcsac {

namespace {

bool all_finite(std::initializer_list<double> vs) {
    for (double v : vs)
        if (!std::isfinite(v)) return false;
    return true;
}

// d(log pi)/du through the tanh log-det correction; the Gaussian terms do
// not depend on u once the noise is fixed.
double dlogp_du(double t) {
    const double s2 = 1.0 - t * t;
    return 2.0 * t * s2 / (s2 + kTanhCorrectionEps);
}

}  // namespace

bool UpdateDiagnostics::finite() const {
    return all_finite({q1_loss, q2_loss, risk_loss, policy_loss, mean_q, mean_risk});
}

Agent::Agent(const MazeSpec& spec, const AgentConfig& cfg, RngStream& init_rng)
    : spec_(spec), cfg_(cfg) {
    state_dim_ = state_feature_dim(spec);
    policy_in_ = state_dim_ + 1;
    critic_in_ = state_dim_ + kActionDim + (cfg.delta_in_critics ? 1 : 0);

    policy = make_mlp(policy_in_, cfg.hidden_dim, 2 * kActionDim, OutputActivation::linear,
                      init_rng);
    q1 = make_mlp(critic_in_, cfg.hidden_dim, 1, OutputActivation::linear, init_rng);
    q2 = make_mlp(critic_in_, cfg.hidden_dim, 1, OutputActivation::linear, init_rng);
    risk = make_mlp(critic_in_, cfg.hidden_dim, 1, OutputActivation::sigmoid, init_rng);
    q1_target = q1;
    q2_target = q2;
    risk_target = risk;

    opt_policy = AdamState::like(policy);
    opt_q1 = AdamState::like(q1);
    opt_q2 = AdamState::like(q2);
    opt_risk = AdamState::like(risk);

    g1_ = Grads::like(q1);
    g2_ = Grads::like(q2);
    gr_ = Grads::like(risk);
    gp_ = Grads::like(policy);
}

void Agent::policy_input(const AgentState& s, double delta, std::vector<double>& out) const {
    thread_local std::vector<double> feat;
    state_features(spec_, s, feat);
    out.resize(policy_in_);
    std::copy(feat.begin(), feat.end(), out.begin());
    out[state_dim_] = delta;
}

void Agent::critic_input(const AgentState& s, std::span<const double> action, double delta,
                         std::vector<double>& out) const {
    thread_local std::vector<double> feat;
    state_features(spec_, s, feat);
    out.resize(critic_in_);
    std::copy(feat.begin(), feat.end(), out.begin());
    out[state_dim_] = action[0];
    out[state_dim_ + 1] = action[1];
    if (cfg_.delta_in_critics) out[state_dim_ + kActionDim] = delta;
}

GaussianHead Agent::policy_head(const AgentState& s, double delta) const {
    thread_local std::vector<double> in, out;
    policy_input(s, delta, in);
    mlp_forward(policy, in, out);
    return GaussianHead::from_net_output(out);
}

Action Agent::select_action(const AgentState& s, double delta, bool stochastic,
                            RngStream& rng) const {
    const GaussianHead head = policy_head(s, delta);
    if (!stochastic) return {std::tanh(head.mean[0]), std::tanh(head.mean[1])};
    const double noise[kActionDim] = {rng.normal(), rng.normal()};
    const SquashedSample smp = sample_squashed_gaussian(head, noise);
    return {smp.action[0], smp.action[1]};
}

void Agent::q_loss(const std::vector<const Transition*>& batch,
                   const std::vector<NoiseRow>& next_noise, Grads& g1, Grads& g2,
                   UpdateDiagnostics& diag) const {
    if (batch.empty()) throw std::invalid_argument("q_loss: empty batch");
    if (next_noise.size() != batch.size())
        throw std::invalid_argument("q_loss: noise size mismatch");
    const double inv_b = 1.0 / batch.size();
    g1.zero();
    g2.zero();

    thread_local std::vector<double> pin, xt, x, out;
    thread_local ForwardCache pol_cache, c1, c2;
    double loss1 = 0, loss2 = 0, mean_q = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& tr = *batch[i];
        double y = tr.reward;
        if (!tr.done) {
            policy_input(tr.s_next, tr.delta, pin);
            const GaussianHead head =
                GaussianHead::from_net_output(mlp_forward_cached(policy, pin, pol_cache));
            const SquashedSample a_next = sample_squashed_gaussian(head, next_noise[i]);
            critic_input(tr.s_next, a_next.action, tr.delta, xt);
            mlp_forward(q1_target, xt, out);
            const double q1t = out[0];
            mlp_forward(q2_target, xt, out);
            const double q2t = out[0];
            y += cfg_.gamma * (std::min(q1t, q2t) - cfg_.alpha * a_next.log_prob);
        }

        const double act[kActionDim] = {tr.a.a0, tr.a.a1};
        critic_input(tr.s, act, tr.delta, x);
        const double q1v = mlp_forward_cached(q1, x, c1)[0];
        const double q2v = mlp_forward_cached(q2, x, c2)[0];
        const double r1 = q1v - y, r2 = q2v - y;
        loss1 += 0.5 * r1 * r1 * inv_b;
        loss2 += 0.5 * r2 * r2 * inv_b;
        mean_q += std::min(q1v, q2v) * inv_b;

        const double up1[1] = {r1 * inv_b};
        const double up2[1] = {r2 * inv_b};
        mlp_backward(q1, c1, up1, &g1, nullptr);
        mlp_backward(q2, c2, up2, &g2, nullptr);
    }
    diag.q1_loss = loss1;
    diag.q2_loss = loss2;
    diag.mean_q = mean_q;
}

void Agent::risk_critic_loss(const std::vector<const Transition*>& batch,
                             const std::vector<NoiseRow>& next_noise, Grads& gr,
                             UpdateDiagnostics& diag) const {
    if (batch.empty()) throw std::invalid_argument("risk_critic_loss: empty batch");
    if (next_noise.size() != batch.size())
        throw std::invalid_argument("risk_critic_loss: noise size mismatch");
    const double inv_b = 1.0 / batch.size();
    gr.zero();

    thread_local std::vector<double> pin, xt, x, out;
    thread_local ForwardCache pol_cache, cr;
    double loss = 0, mean_risk = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& tr = *batch[i];
        double target = tr.r_b;
        if (!tr.done) {
            policy_input(tr.s_next, tr.delta, pin);
            const GaussianHead head =
                GaussianHead::from_net_output(mlp_forward_cached(policy, pin, pol_cache));
            const SquashedSample a_next = sample_squashed_gaussian(head, next_noise[i]);
            critic_input(tr.s_next, a_next.action, tr.delta, xt);
            mlp_forward(risk_target, xt, out);
            target += (1.0 - tr.r_b) * out[0];
        }

        const double act[kActionDim] = {tr.a.a0, tr.a.a1};
        critic_input(tr.s, act, tr.delta, x);
        const double rv = mlp_forward_cached(risk, x, cr)[0];
        const double res = rv - target;
        loss += 0.5 * res * res * inv_b;
        mean_risk += rv * inv_b;

        const double up[1] = {res * inv_b};
        mlp_backward(risk, cr, up, &gr, nullptr);
    }
    diag.risk_loss = loss;
    diag.mean_risk = mean_risk;
}

double Agent::policy_loss(const std::vector<const Transition*>& batch,
                          const std::vector<NoiseRow>& eps, Grads& gp) const {
    if (batch.empty()) throw std::invalid_argument("policy_loss: empty batch");
    if (eps.size() != batch.size()) throw std::invalid_argument("policy_loss: noise size mismatch");
    const double inv_b = 1.0 / batch.size();
    gp.zero();

    thread_local std::vector<double> pin, x, dq_din, dr_din;
    thread_local ForwardCache pol_cache, c1, c2, cr;
    double loss = 0;
    std::vector<double> up_policy(2 * kActionDim);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& tr = *batch[i];
        policy_input(tr.s, tr.delta, pin);
        const GaussianHead head =
            GaussianHead::from_net_output(mlp_forward_cached(policy, pin, pol_cache));
        const SquashedSample smp = sample_squashed_gaussian(head, eps[i]);

        critic_input(tr.s, smp.action, tr.delta, x);
        const double q1v = mlp_forward_cached(q1, x, c1)[0];
        const double q2v = mlp_forward_cached(q2, x, c2)[0];
        const double qmin = std::min(q1v, q2v);
        const double riskv = mlp_forward_cached(risk, x, cr)[0];
        const double viol = riskv - tr.delta;

        loss += (cfg_.alpha * smp.log_prob - qmin +
                 cfg_.lambda_er * (viol > 0.0 ? viol : 0.0)) * inv_b;

        // dL/da through the frozen critics.
        const double up_q[1] = {-1.0};
        mlp_backward(q1v <= q2v ? q1 : q2, q1v <= q2v ? c1 : c2, up_q, nullptr, &dq_din);
        double dl_da[kActionDim] = {dq_din[state_dim_], dq_din[state_dim_ + 1]};
        if (cfg_.lambda_er > 0.0 && viol > 0.0) {
            const double up_r[1] = {cfg_.lambda_er};
            mlp_backward(risk, cr, up_r, nullptr, &dr_din);
            dl_da[0] += dr_din[state_dim_];
            dl_da[1] += dr_din[state_dim_ + 1];
        }

        for (int j = 0; j < kActionDim; ++j) {
            const double t = std::tanh(smp.pre_tanh[j]);
            const double s2 = 1.0 - t * t;
            const double du = cfg_.alpha * dlogp_du(t) + dl_da[j] * s2;
            const double sigma = std::exp(head.log_std[j]);
            const bool in_clamp =
                head.raw_log_std[j] > kLogStdMin && head.raw_log_std[j] < kLogStdMax;
            up_policy[j] = du * inv_b;
            up_policy[kActionDim + j] =
                in_clamp ? (-cfg_.alpha + du * eps[i][j] * sigma) * inv_b : 0.0;
        }
        mlp_backward(policy, pol_cache, up_policy, &gp, nullptr);
    }
    return loss;
}

UpdateDiagnostics Agent::update_step(const ReplayBuffer& buffer, int batch_size,
                                     RngStream& sample_rng, RngStream& noise_rng) {
    UpdateDiagnostics diag;
    if (buffer.size() < static_cast<std::size_t>(batch_size)) {
        diag.skipped = true;
        return diag;
    }
    buffer.sample(batch_size, sample_rng, batch_);

    auto draw = [&](std::vector<NoiseRow>& rows) {
        rows.resize(batch_.size());
        for (NoiseRow& r : rows)
            for (double& v : r) v = noise_rng.normal();
    };

    draw(noise_a_);
    q_loss(batch_, noise_a_, g1_, g2_, diag);
    adam_step(q1, g1_, opt_q1, cfg_.lr);
    adam_step(q2, g2_, opt_q2, cfg_.lr);

    draw(noise_b_);
    risk_critic_loss(batch_, noise_b_, gr_, diag);
    adam_step(risk, gr_, opt_risk, cfg_.lr);

    draw(noise_a_);
    diag.policy_loss = policy_loss(batch_, noise_a_, gp_);
    adam_step(policy, gp_, opt_policy, cfg_.lr);

    polyak_update(q1_target, q1, cfg_.tau);
    polyak_update(q2_target, q2, cfg_.tau);
    polyak_update(risk_target, risk, cfg_.tau);
    return diag;
}

}  // namespace rcsac
