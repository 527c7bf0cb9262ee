#include <doctest.h>

#include <cmath>
#include <fstream>

#include "rcsac/config.hpp"
#include "rcsac/env.hpp"

using namespace rcsac;

namespace {
constexpr double kPi = 3.14159265358979323846;

MazeSpec one_obstacle() {
    MazeSpec m;
    m.name = "one_obstacle";
    m.obstacles = {{4.0, 6.0, 3.0, 7.0}};
    m.validate();
    return m;
}
}  // namespace

TEST_CASE("linear step examples") {
    const MazeSpec m = one_obstacle();
    AgentState s{0, 0, 0, 0};
    AgentState n = linear_step(m, s, 1.0, 0.0, 1.0);
    CHECK(n.x == 1.0);
    CHECK(n.y == 0.0);

    const double r = 1.0 / std::sqrt(2.0);
    n = linear_step(m, {10, 10, 0, 0}, r, r, 1.0);
    CHECK(n.x == 10.0);
    CHECK(n.y == 10.0);

    n = linear_step(m, {5, 5, 0, 0}, 0.6, -0.8, 0.5);
    CHECK(n.x == doctest::Approx(5.3).epsilon(1e-12));
    CHECK(n.y == doctest::Approx(4.6).epsilon(1e-12));
}

TEST_CASE("dubins step examples") {
    const MazeSpec m = one_obstacle();
    AgentState n = dubins_step(m, {0, 0, 0, 1}, 0.0, 0.0, 1.0);
    CHECK(n.x == 1.0);
    CHECK(n.y == 0.0);
    CHECK(n.theta == 0.0);
    CHECK(n.v == 1.0);

    // Zero speed: position fixed, heading rotates.
    n = dubins_step(m, {3, 3, 0.2, 0}, 0.7, 0.0, 1.0);
    CHECK(n.x == 3.0);
    CHECK(n.y == 3.0);
    CHECK(n.theta == doctest::Approx(0.9).epsilon(1e-12));

    n = dubins_step(m, {0, 0, kPi / 2, 1}, 0.5, -0.2, 1.0);
    CHECK(std::fabs(n.x) < 1e-12);
    CHECK(n.y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n.theta == doctest::Approx(kPi / 2 + 0.5).epsilon(1e-12));
    CHECK(n.v == doctest::Approx(0.8).epsilon(1e-12));

    // Speed clamps at [0, v_max].
    n = dubins_step(m, {5, 5, 0, 0.9}, 0.0, 0.5, 1.0);
    CHECK(n.v == 1.0);
    n = dubins_step(m, {5, 5, 0, 0.1}, 0.0, -0.5, 1.0);
    CHECK(n.v == 0.0);
}

TEST_CASE("angle wrapping lands in (-pi, pi]") {
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
    RngStream rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double w = wrap_angle(rng.uniform(-100, 100));
        CHECK(w > -kPi);
        CHECK(w <= kPi);
    }
}

TEST_CASE("collision uses closed rectangles") {
    const MazeSpec m = one_obstacle();
    CHECK(in_collision(m, 5.0, 5.0));
    CHECK_FALSE(in_collision(m, 1.0, 1.0));
    CHECK(in_collision(m, 4.0, 5.0));  // edge
    CHECK(in_collision(m, 6.0, 7.0));  // corner
    CHECK_FALSE(in_collision(m, 6.0 + 1e-12, 7.0));
}

TEST_CASE("obstacle clearance") {
    const MazeSpec m = one_obstacle();
    CHECK(obstacle_clearance(m, 5.0, 5.0) == 0.0);
    CHECK(obstacle_clearance(m, 5.0, 8.0) == doctest::Approx(1.0));
    CHECK(obstacle_clearance(m, 3.0, 2.0) == doctest::Approx(std::hypot(1.0, 1.0)));
}

TEST_CASE("reward: step cost and goal bonus") {
    MazeSpec m = one_obstacle();
    const AgentState away{2, 2, 0, 0};
    const AgentState at_goal_state{9.2, 5.0, 0, 0};
    CHECK(reward(m, away, {}, away) == -1.0);
    CHECK(reward(m, away, {}, at_goal_state) == 99.0);
    m.goal_bonus = 0.0;
    CHECK(reward(m, away, {}, at_goal_state) == -1.0);
}

TEST_CASE("reset modes") {
    MazeSpec m = one_obstacle();
    RngStream rng(9);
    const AgentState s = env_reset(m, rng);
    CHECK(s.x == m.start_x);
    CHECK(s.y == m.start_y);

    m.start_mode = StartMode::uniform_free;
    for (int i = 0; i < 100000; ++i) {
        const AgentState u = env_reset(m, rng);
        CHECK_FALSE(in_collision(m, u.x, u.y));
        CHECK(m.bounds.contains(u.x, u.y));
    }

    RngStream a(42), b(42);
    const AgentState ua = env_reset(m, a), ub = env_reset(m, b);
    CHECK(ua.x == ub.x);
    CHECK(ua.y == ub.y);
}

TEST_CASE("over-full maze start sampling errors out") {
    MazeSpec m;
    m.obstacles = {{0.0, 10.0, 0.0, 10.0}};  // everything blocked
    RngStream rng(1);
    m.start_mode = StartMode::uniform_free;
    CHECK_THROWS_AS(env_reset(m, rng), ConfigError);
}

TEST_CASE("fuzz: states stay in bounds under random actions") {
    for (Dynamics dyn : {Dynamics::linear, Dynamics::dubins}) {
        MazeSpec m = one_obstacle();
        m.dynamics = dyn;
        RngStream rng(17);
        AgentState s{5, 5, 0, 0};
        for (int i = 0; i < 100000; ++i) {
            const Action a{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
            s = env_step(m, s, a, i % m.horizon).next;
            CHECK(m.bounds.contains(s.x, s.y));
            CHECK(s.theta > -kPi);
            CHECK(s.theta <= kPi);
            CHECK(s.v >= 0.0);
            CHECK(s.v <= m.v_max);
        }
    }
}

TEST_CASE("stepping is bit-deterministic and zero action is a fixed point") {
    MazeSpec m = one_obstacle();
    const AgentState s{3.3, 4.4, 0, 0};
    const Action a{0.37, -0.91};
    const StepResult r1 = env_step(m, s, a, 0);
    const StepResult r2 = env_step(m, s, a, 0);
    CHECK(r1.next.x == r2.next.x);
    CHECK(r1.next.y == r2.next.y);

    const StepResult still = env_step(m, s, {0, 0}, 0);
    CHECK(still.next.x == s.x);
    CHECK(still.next.y == s.y);

    m.dynamics = Dynamics::dubins;
    const StepResult still_d = env_step(m, {3.3, 4.4, 1.0, 0.0}, {0, 0}, 0);
    CHECK(still_d.next.x == 3.3);
    CHECK(still_d.next.y == 4.4);
}

TEST_CASE("episode termination: goal wins, horizon caps length") {
    MazeSpec m = one_obstacle();
    // One step from the goal, heading straight in.
    const StepResult hit = env_step(m, {8.2, 5.0, 0, 0}, {1.0, 0.0}, 0);
    CHECK(hit.done);
    CHECK(hit.reason == DoneReason::goal);
    CHECK(std::hypot(hit.next.x - m.goal_x, hit.next.y - m.goal_y) <= m.goal_radius);

    const StepResult capped = env_step(m, {1.0, 1.0, 0, 0}, {0.1, 0.0}, m.horizon - 1);
    CHECK(capped.done);
    CHECK(capped.reason == DoneReason::horizon);

    int steps = 0;
    AgentState s{1, 5, 0, 0};
    RngStream rng(23);
    for (int t = 0; t < m.horizon; ++t) {
        const StepResult res = env_step(m, s, {rng.uniform(-1, 1), rng.uniform(-1, 1)}, t);
        ++steps;
        s = res.next;
        if (res.done) break;
    }
    CHECK(steps <= m.horizon);
}

TEST_CASE("action projection obeys the command bounds") {
    MazeSpec m = one_obstacle();
    RngStream rng(29);
    for (int i = 0; i < 10000; ++i) {
        const Action a{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const PhysicalAction u = project_action(m, a);
        CHECK(std::hypot(u.u0, u.u1) <= m.v_max + 1e-12);
    }
    m.dynamics = Dynamics::dubins;
    const PhysicalAction u = project_action(m, {-1.0, 1.0});
    CHECK(u.u0 == -m.turn_rate_max);
    CHECK(u.u1 == m.accel_max);
}

TEST_CASE("transition noise flag perturbs the state") {
    MazeSpec m = one_obstacle();
    m.noise_in_transition = true;
    m.noise_std = 0.5;
    RngStream rng(31);
    const StepResult res = env_step(m, {5.0, 8.0, 0, 0}, {0, 0}, 0, &rng);
    CHECK(res.next.x != 5.0);  // noise applied
    CHECK(m.bounds.contains(res.next.x, res.next.y));
}

TEST_CASE("state features: normalized positions, dubins adds heading/speed") {
    MazeSpec m = one_obstacle();
    std::vector<double> f;
    state_features(m, {0.0, 10.0, 0, 0}, f);
    CHECK(f == std::vector<double>{-1.0, 1.0});
    state_features(m, {5.0, 5.0, 0, 0}, f);
    CHECK(f == std::vector<double>{0.0, 0.0});

    m.dynamics = Dynamics::dubins;
    state_features(m, {5.0, 5.0, kPi / 2, 0.5}, f);
    REQUIRE(f.size() == 5);
    CHECK(f[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f[3] == doctest::Approx(1.0));
    CHECK(f[4] == doctest::Approx(0.5));
}

TEST_CASE("TOML and JSON configs parse to the same maze") {
    const char* toml_text = R"(
# comment
name = "demo"
dynamics = "dubins"
bounds = [0.0, 10.0, 0.0, 10.0]
obstacles = [
  [4.5, 5.5, 0.0, 2.0],  # lower wall
  [4.5, 5.5, 3.0, 7.0],
]
start = [2.0, 5.0]
goal = [8.0, 5.0]
goal_radius = 0.5
horizon = 80
noise_std = 0.5
start_mode = "fixed"
)";
    const MazeSpec m = maze_from_table(parse_toml(toml_text));
    CHECK(m.name == "demo");
    CHECK(m.dynamics == Dynamics::dubins);
    CHECK(m.obstacles.size() == 2);
    CHECK(m.obstacles[1].y_min == 3.0);
    CHECK(m.horizon == 80);
    CHECK(m.noise_std == 0.5);
}

TEST_CASE("unknown config keys are rejected") {
    CHECK_THROWS_AS(maze_from_table(parse_toml("horizom = 50\n")), ConfigError);
    CHECK_THROWS_AS(train_from_table(parse_toml("learning_rate = 0.1\n")), ConfigError);
}

TEST_CASE("resolved snapshot round-trips") {
    MazeSpec m = one_obstacle();
    m.dynamics = Dynamics::dubins;
    m.noise_std = 0.25;
    TrainConfig t;
    t.epochs = 42;
    t.lambda_er = 20.0;
    t.seed = 987654321;
    const std::string text = resolved_config_toml(m, t);

    const ConfigTable table = parse_toml(text);
    const MazeSpec m2 = maze_from_table(table);
    const TrainConfig t2 = train_from_table(table);
    CHECK(m2.dynamics == m.dynamics);
    CHECK(m2.noise_std == m.noise_std);
    CHECK(m2.obstacles.size() == m.obstacles.size());
    CHECK(t2.epochs == 42);
    CHECK(t2.lambda_er == 20.0);
    CHECK(t2.seed == 987654321);
    CHECK(resolved_config_toml(m2, t2) == text);
    CHECK(config_hash(text) == config_hash(text));
    CHECK(config_hash(text).size() == 16);
}

TEST_CASE("overrides hit the owning schema") {
    MazeSpec m = one_obstacle();
    TrainConfig t;
    apply_override(m, t, "noise_std=0.5");
    apply_override(m, t, "lambda_er=0");
    apply_override(m, t, "delta_in_critics=false");
    CHECK(m.noise_std == 0.5);
    CHECK(t.lambda_er == 0.0);
    CHECK_FALSE(t.delta_in_critics);
    CHECK_THROWS_AS(apply_override(m, t, "nonsense=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(m, t, "gamma=2.0"), ConfigError);  // validate() kicks in
}
