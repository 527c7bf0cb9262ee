#include "rcsac/env.hpp"

#include <algorithm>
#include <cmath>

namespace rcsac {

namespace {
constexpr double kPi = 3.14159265358979323846;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void clamp_position(const MazeSpec& spec, AgentState& s) {
    s.x = clamp(s.x, spec.bounds.x_min, spec.bounds.x_max);
    s.y = clamp(s.y, spec.bounds.y_min, spec.bounds.y_max);
}
}  // namespace

double wrap_angle(double theta) {
    double t = std::fmod(theta + kPi, 2.0 * kPi);
    if (t <= 0.0) t += 2.0 * kPi;
    return t - kPi;
}

AgentState linear_step(const MazeSpec& spec, const AgentState& s, double vx, double vy,
                       double dt) {
    AgentState n = s;
    n.x += vx * dt;
    n.y += vy * dt;
    clamp_position(spec, n);
    return n;
}

AgentState dubins_step(const MazeSpec& spec, const AgentState& s, double u_theta, double u_v,
                       double dt) {
    AgentState n = s;
    n.x += s.v * std::cos(s.theta) * dt;
    n.y += s.v * std::sin(s.theta) * dt;
    n.theta = wrap_angle(s.theta + u_theta * dt);
    n.v = clamp(s.v + u_v * dt, 0.0, spec.v_max);
    clamp_position(spec, n);
    return n;
}

PhysicalAction project_action(const MazeSpec& spec, const Action& a) {
    if (spec.dynamics == Dynamics::linear) {
        double vx = a.a0, vy = a.a1;
        const double norm = std::hypot(vx, vy);
        if (norm > 1.0) {
            vx /= norm;
            vy /= norm;
        }
        return {vx * spec.v_max, vy * spec.v_max};
    }
    return {a.a0 * spec.turn_rate_max, a.a1 * spec.accel_max};
}

bool at_goal(const MazeSpec& spec, const AgentState& s) {
    return std::hypot(s.x - spec.goal_x, s.y - spec.goal_y) <= spec.goal_radius;
}

double reward(const MazeSpec& spec, const AgentState&, const Action&, const AgentState& next) {
    double r = -spec.step_cost;
    if (at_goal(spec, next)) r += spec.goal_bonus;
    return r;
}

AgentState env_reset(const MazeSpec& spec, RngStream& rng) {
    AgentState s;
    s.theta = spec.start_theta;
    s.v = spec.start_v;
    if (spec.start_mode == StartMode::fixed) {
        s.x = spec.start_x;
        s.y = spec.start_y;
        return s;
    }
    for (int tries = 0; tries < 10000; ++tries) {
        const double x = rng.uniform(spec.bounds.x_min, spec.bounds.x_max);
        const double y = rng.uniform(spec.bounds.y_min, spec.bounds.y_max);
        if (!in_collision(spec, x, y)) {
            s.x = x;
            s.y = y;
            return s;
        }
    }
    throw ConfigError(spec.name + ": could not sample a collision-free start in 10^4 tries");
}

StepResult env_step(const MazeSpec& spec, const AgentState& s, const Action& a, int t,
                    RngStream* noise_rng) {
    const PhysicalAction u = project_action(spec, a);
    AgentState next = spec.dynamics == Dynamics::linear
                          ? linear_step(spec, s, u.u0, u.u1, spec.dt)
                          : dubins_step(spec, s, u.u0, u.u1, spec.dt);
    if (spec.noise_in_transition && noise_rng != nullptr && spec.noise_std > 0.0) {
        next.x += spec.noise_std * noise_rng->normal();
        next.y += spec.noise_std * noise_rng->normal();
        next.x = clamp(next.x, spec.bounds.x_min, spec.bounds.x_max);
        next.y = clamp(next.y, spec.bounds.y_min, spec.bounds.y_max);
    }

    StepResult res;
    res.next = next;
    res.reward = reward(spec, s, a, next);
    if (at_goal(spec, next)) {
        res.done = true;
        res.reason = DoneReason::goal;
    } else if (t + 1 >= spec.horizon) {
        res.done = true;
        res.reason = DoneReason::horizon;
    }
    return res;
}

int state_feature_dim(const MazeSpec& spec) {
    return spec.dynamics == Dynamics::linear ? 2 : 5;
}

void state_features(const MazeSpec& spec, const AgentState& s, std::vector<double>& out) {
    const Rect& b = spec.bounds;
    out.resize(state_feature_dim(spec));
    out[0] = 2.0 * (s.x - b.x_min) / b.width() - 1.0;
    out[1] = 2.0 * (s.y - b.y_min) / b.height() - 1.0;
    if (spec.dynamics == Dynamics::dubins) {
        out[2] = std::cos(s.theta);
        out[3] = std::sin(s.theta);
        out[4] = s.v / spec.v_max;
    }
}

}  // namespace rcsac
