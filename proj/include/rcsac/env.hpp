#pragma once

#include <vector>

#include "rcsac/maze.hpp"
#include "rcsac/rng.hpp"

namespace rcsac {

// Pose. theta/v are meaningful for Dubins dynamics only and stay 0 in
// linear mode.
struct AgentState {
    double x = 0, y = 0;
    double theta = 0;  // wrapped to (-pi, pi]
    double v = 0;      // clamped to [0, v_max]
};

// Policy-space action, each component in (-1, 1). The environment maps it
// to the physical command (unit-disk velocity, or turn rate/acceleration).
inline constexpr int kActionDim = 2;
struct Action {
    double a0 = 0, a1 = 0;
};

enum class DoneReason { none, goal, horizon };

struct StepResult {
    AgentState next;
    double reward = 0;
    bool done = false;
    DoneReason reason = DoneReason::none;
};

double wrap_angle(double theta);  // to (-pi, pi]

// Physical-space kinematics (explicit Euler), positions clamped to bounds.
AgentState linear_step(const MazeSpec& spec, const AgentState& s, double vx, double vy, double dt);
AgentState dubins_step(const MazeSpec& spec, const AgentState& s, double u_theta, double u_v,
                       double dt);

// Policy action -> physical command. Linear: radial rescale onto the unit
// disk when |a| > 1, then scaled by v_max. Dubins: per-axis scaling to
// [-turn_rate_max, turn_rate_max] x [-accel_max, accel_max].
struct PhysicalAction {
    double u0 = 0, u1 = 0;
};
PhysicalAction project_action(const MazeSpec& spec, const Action& a);

double reward(const MazeSpec& spec, const AgentState& prev, const Action& a,
              const AgentState& next);

bool at_goal(const MazeSpec& spec, const AgentState& s);

AgentState env_reset(const MazeSpec& spec, RngStream& rng);

// t is the number of steps already taken in the episode; the step being
// applied is step t (0-based). done fires on goal or when t+1 == horizon.
// noise_rng is consulted only when spec.noise_in_transition is set.
StepResult env_step(const MazeSpec& spec, const AgentState& s, const Action& a, int t,
                    RngStream* noise_rng = nullptr);

// Network input encoding: positions scaled to [-1, 1]; Dubins adds
// (cos theta, sin theta, v / v_max).
int state_feature_dim(const MazeSpec& spec);
void state_features(const MazeSpec& spec, const AgentState& s, std::vector<double>& out);

}  // namespace rcsac
