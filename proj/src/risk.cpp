#include "rcsac/risk.hpp"

#include <cmath>
#include <stdexcept>

namespace rcsac {

double immediate_risk_mc(const MazeSpec& spec, const AgentState& s, double sigma, int n_samples,
                         RngStream& rng) {
    if (n_samples < 1) throw std::invalid_argument("immediate_risk_mc: n_samples must be >= 1");
    if (sigma < 0.0) throw std::invalid_argument("immediate_risk_mc: sigma must be >= 0");
    if (spec.obstacles.empty()) return 0.0;
    if (sigma == 0.0) return in_collision(spec, s.x, s.y) ? 1.0 : 0.0;
    int hits = 0;
    for (int i = 0; i < n_samples; ++i) {
        const double px = s.x + sigma * rng.normal();
        const double py = s.y + sigma * rng.normal();
        if (in_collision(spec, px, py)) ++hits;
    }
    return static_cast<double>(hits) / n_samples;
}

double execution_risk_exact(std::span<const double> rb_seq) {
    if (rb_seq.empty()) return 0.0;
    double er = 0.0;
    for (std::size_t i = rb_seq.size(); i-- > 0;) {
        const double rb = rb_seq[i];
        if (!(rb >= 0.0 && rb <= 1.0))
            throw std::domain_error("execution_risk_exact: immediate risk outside [0, 1]");
        er = rb + (1.0 - rb) * er;
    }
    return er;
}

double execution_risk_sum_approx(std::span<const double> rb_seq) {
    double sum = 0.0;
    for (double rb : rb_seq) sum += rb;
    return sum;
}

namespace {

// Nominal trajectory under the deterministic policy; returns visited states
// s_0..s_T (both endpoints included).
std::vector<AgentState> rollout_states(const MazeSpec& spec, const PolicyFn& policy, double delta,
                                       RngStream& reset_rng) {
    std::vector<AgentState> states;
    AgentState s = env_reset(spec, reset_rng);
    states.push_back(s);
    for (int t = 0; t < spec.horizon; ++t) {
        const StepResult res = env_step(spec, s, policy(s, delta), t);
        s = res.next;
        states.push_back(s);
        if (res.done) break;
    }
    return states;
}

}  // namespace

ExecRiskResult policy_execution_risk_mc(const MazeSpec& spec, const PolicyFn& policy, double delta,
                                        const ExecRiskOptions& opts, std::uint64_t seed) {
    if (opts.n_rollouts < 1)
        throw std::invalid_argument("policy_execution_risk_mc: n_rollouts must be >= 1");
    const SeedRegistry reg(seed);
    ExecRiskResult out;
    out.per_rollout.reserve(opts.n_rollouts);
    for (int k = 0; k < opts.n_rollouts; ++k) {
        RngStream rng = reg.stream("exec-risk-rollout", static_cast<std::uint64_t>(k));
        const std::vector<AgentState> states = rollout_states(spec, policy, delta, rng);
        double er = 0.0;
        if (opts.mode == ExecRiskMode::nominal_recursion) {
            std::vector<double> rb(states.size());
            for (std::size_t i = 0; i < states.size(); ++i)
                rb[i] = immediate_risk_mc(spec, states[i], opts.sigma, opts.mc_samples_per_step, rng);
            er = execution_risk_exact(rb);
        } else {
            bool unsafe = false;
            for (const AgentState& s : states) {
                const double px = s.x + opts.sigma * rng.normal();
                const double py = s.y + opts.sigma * rng.normal();
                if (in_collision(spec, px, py)) {
                    unsafe = true;
                    break;
                }
            }
            er = unsafe ? 1.0 : 0.0;
        }
        out.per_rollout.push_back(er);
    }
    double sum = 0.0;
    for (double v : out.per_rollout) sum += v;
    out.mean = sum / out.per_rollout.size();
    double ss = 0.0;
    for (double v : out.per_rollout) ss += (v - out.mean) * (v - out.mean);
    out.stddev = out.per_rollout.size() > 1 ? std::sqrt(ss / (out.per_rollout.size() - 1)) : 0.0;
    return out;
}

}  // namespace rcsac
