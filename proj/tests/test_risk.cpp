#include <doctest.h>

#include <cmath>

#include "rcsac/oracles.hpp"
#include "rcsac/risk.hpp"

using namespace rcsac;

namespace {
MazeSpec centered_box_maze() {
    MazeSpec m;
    m.name = "box";
    m.obstacles = {{4.0, 6.0, 4.0, 6.0}};
    m.validate();
    return m;
}
}  // namespace

TEST_CASE("exact recursion examples") {
    CHECK(execution_risk_exact(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
    CHECK(execution_risk_exact(std::vector<double>{0.2, 1.0, 0.1}) == 1.0);
    CHECK(execution_risk_exact(std::vector<double>{0.1, 0.2, 0.3}) ==
          doctest::Approx(0.496).epsilon(1e-14));
    CHECK(execution_risk_exact(std::vector<double>{}) == 0.0);
    CHECK_THROWS_AS(execution_risk_exact(std::vector<double>{0.5, 1.2}), std::domain_error);
    CHECK_THROWS_AS(execution_risk_exact(std::vector<double>{-0.1}), std::domain_error);
}

TEST_CASE("sum approximation examples") {
    CHECK(execution_risk_sum_approx(std::vector<double>{0.1, 0.2, 0.3}) ==
          doctest::Approx(0.6).epsilon(1e-14));
    CHECK(execution_risk_sum_approx(std::vector<double>{0.0, 0.0}) == 0.0);
    // Single nonzero entry: approximation is exact.
    const std::vector<double> one{0.0, 0.4, 0.0};
    CHECK(execution_risk_sum_approx(one) == execution_risk_exact(one));
    // Unclamped above 1.
    CHECK(execution_risk_sum_approx(std::vector<double>{0.8, 0.9}) ==
          doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("recursion matches brute-force enumeration") {
    RngStream rng(101);
    for (int rep = 0; rep < 1000; ++rep) {
        const int T = 1 + static_cast<int>(rng.uniform_index(0, 9));
        std::vector<double> rb(T);
        for (double& v : rb) v = rng.uniform();
        CHECK(std::fabs(execution_risk_exact(rb) - bernoulli_any_event_prob(rb)) <= 1e-12);
    }
}

TEST_CASE("recursion bounds and monotonicity") {
    RngStream rng(103);
    for (int rep = 0; rep < 2000; ++rep) {
        const int T = 1 + static_cast<int>(rng.uniform_index(0, 14));
        std::vector<double> rb(T);
        for (double& v : rb) v = rng.uniform();
        const double exact = execution_risk_exact(rb);
        const double approx = execution_risk_sum_approx(rb);
        CHECK(exact >= 0.0);
        CHECK(exact <= 1.0);
        CHECK(exact <= std::min(1.0, approx) + 1e-15);

        // Raising one entry never lowers the risk.
        const std::size_t idx = rng.uniform_index(0, T - 1);
        std::vector<double> bumped = rb;
        bumped[idx] = std::min(1.0, bumped[idx] + rng.uniform() * (1.0 - bumped[idx]));
        CHECK(execution_risk_exact(bumped) >= exact - 1e-15);
    }
}

TEST_CASE("immediate risk: empty constraint set and indicator limit") {
    MazeSpec empty;
    empty.name = "empty";
    empty.validate();
    RngStream rng(7);
    CHECK(immediate_risk_mc(empty, {5, 5, 0, 0}, 1.0, 100, rng) == 0.0);

    const MazeSpec box = centered_box_maze();
    CHECK(immediate_risk_mc(box, {5, 5, 0, 0}, 0.0, 100, rng) == 1.0);
    CHECK(immediate_risk_mc(box, {1, 1, 0, 0}, 0.0, 100, rng) == 0.0);
    CHECK(immediate_risk_mc(box, {5, 5, 0, 0}, 1e-9, 1000, rng) == 1.0);
}

TEST_CASE("immediate risk converges to the analytic rectangle probability") {
    const MazeSpec box = centered_box_maze();
    const double want = analytic_rect_prob(box.obstacles[0], 5.0, 5.0, 1.0);
    CHECK(want == doctest::Approx(0.4660649426743922).epsilon(1e-15));
    int ok = 0;
    for (int rep = 0; rep < 10; ++rep) {
        RngStream rng(1000 + rep);
        const double got = immediate_risk_mc(box, {5, 5, 0, 0}, 1.0, 10000, rng);
        if (std::fabs(got - want) <= 0.015) ++ok;
    }
    CHECK(ok >= 9);
}

TEST_CASE("immediate risk is bit-reproducible under a fixed seed") {
    const MazeSpec box = centered_box_maze();
    RngStream a(55), b(55);
    CHECK(immediate_risk_mc(box, {4.5, 5.5, 0, 0}, 0.7, 5000, a) ==
          immediate_risk_mc(box, {4.5, 5.5, 0, 0}, 0.7, 5000, b));
}

TEST_CASE("policy execution risk: trivial cases") {
    MazeSpec empty;
    empty.name = "empty";
    empty.horizon = 10;
    empty.validate();
    const PolicyFn straight = [](const AgentState&, double) { return Action{1.0, 0.0}; };

    ExecRiskOptions opts;
    opts.n_rollouts = 20;
    opts.mc_samples_per_step = 50;
    opts.sigma = 1.0;
    CHECK(policy_execution_risk_mc(empty, straight, 0.2, opts, 1).mean == 0.0);

    // Straight through the obstacle with vanishing uncertainty.
    MazeSpec box = centered_box_maze();
    box.start_x = 1.0;
    box.start_y = 5.0;
    box.goal_x = 9.0;
    box.goal_y = 5.0;
    box.horizon = 20;
    opts.sigma = 1e-12;
    CHECK(policy_execution_risk_mc(box, straight, 0.2, opts, 1).mean == 1.0);
    opts.mode = ExecRiskMode::bernoulli_flags;
    CHECK(policy_execution_risk_mc(box, straight, 0.2, opts, 1).mean == 1.0);
}

TEST_CASE("policy execution risk is seed-deterministic") {
    MazeSpec box = centered_box_maze();
    box.horizon = 15;
    const PolicyFn drift = [](const AgentState& s, double) {
        return Action{0.8, s.y > 5.0 ? -0.2 : 0.2};
    };
    ExecRiskOptions opts;
    opts.n_rollouts = 30;
    opts.mc_samples_per_step = 100;
    opts.sigma = 0.6;
    const ExecRiskResult a = policy_execution_risk_mc(box, drift, 0.2, opts, 99);
    const ExecRiskResult b = policy_execution_risk_mc(box, drift, 0.2, opts, 99);
    CHECK(a.mean == b.mean);
    CHECK(a.stddev == b.stddev);
    CHECK(a.mean >= 0.0);
    CHECK(a.mean <= 1.0);
}

TEST_CASE("bernoulli-flag mode agrees with the recursion mode statistically") {
    MazeSpec box = centered_box_maze();
    box.horizon = 12;
    const PolicyFn skim = [](const AgentState&, double) { return Action{1.0, 0.35}; };
    ExecRiskOptions rec;
    rec.n_rollouts = 50;
    rec.mc_samples_per_step = 400;
    rec.sigma = 0.5;
    ExecRiskOptions flags = rec;
    flags.mode = ExecRiskMode::bernoulli_flags;
    flags.n_rollouts = 4000;
    const double a = policy_execution_risk_mc(box, skim, 0.2, rec, 3).mean;
    const double b = policy_execution_risk_mc(box, skim, 0.2, flags, 4).mean;
    CHECK(std::fabs(a - b) <= 0.05);
}
