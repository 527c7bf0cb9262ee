#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rcsac/agent.hpp"

namespace rcsac::selftest {

// Width-8 agent over a small linear maze, plus a synthetic batch factory.
// Shared by the selftest command, the unit tests and the acceptance suite.
MazeSpec test_maze();
std::unique_ptr<Agent> make_test_agent(std::uint64_t seed, double lambda_er,
                                       bool delta_in_critics = true, int hidden = 8);
std::vector<Transition> make_synthetic_batch(const MazeSpec& spec, std::size_t n,
                                             std::uint64_t seed, double fixed_delta = -1.0);

struct SuiteResult {
    std::string name;
    int checks = 0;
    bool passed = true;
    std::string first_failure;
};

struct Options {
    std::string suite_filter;  // empty = all; otherwise substring match
    std::string mutation;      // e.g. "recursion-sign" (negative-control fixture)
    std::uint64_t seed = 12345;
    int gradient_seeds = 5;  // acceptance reruns these suites at 20 seeds
};

// Suites: recursion (enumeration oracle), risk-mc (analytic rectangle
// probability), gradients (finite differences), density (quadrature).
std::vector<SuiteResult> run_suites(const Options& opts);

}  // namespace rcsac::selftest
