#include <doctest.h>

#include <cmath>

#include "rcsac/gaussian.hpp"
#include "rcsac/rng.hpp"
#include "rcsac/selftest.hpp"

using namespace rcsac;

TEST_CASE("head construction clamps log_std") {
    const std::vector<double> out{0.3, -0.7, -50.0, 9.0};
    const GaussianHead h = GaussianHead::from_net_output(out);
    CHECK(h.mean == std::vector<double>{0.3, -0.7});
    CHECK(h.log_std[0] == kLogStdMin);
    CHECK(h.log_std[1] == kLogStdMax);
    CHECK(h.raw_log_std == std::vector<double>{-50.0, 9.0});
}

TEST_CASE("zero mean at the clamp floor with zero noise") {
    GaussianHead h = GaussianHead::from_net_output(std::vector<double>{0.0, -50.0});
    const SquashedSample s = sample_squashed_gaussian(h, std::vector<double>{0.0});
    CHECK(s.action[0] == 0.0);
    // Gaussian term is -log_std - log sqrt(2*pi); the tanh correction is ~0.
    const double expected = -kLogStdMin - 0.9189385332046727 - std::log(1.0 + 1e-6);
    CHECK(s.log_prob == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("deterministic given fixed inputs") {
    GaussianHead h = GaussianHead::from_net_output(std::vector<double>{0.4, -1.1, -0.3, 0.2});
    const std::vector<double> noise{0.7, -1.9};
    const SquashedSample a = sample_squashed_gaussian(h, noise);
    const SquashedSample b = sample_squashed_gaussian(h, noise);
    CHECK(a.action == b.action);
    CHECK(a.log_prob == b.log_prob);
}

TEST_CASE("actions stay strictly inside (-1,1)") {
    RngStream rng(5);
    for (int rep = 0; rep < 2000; ++rep) {
        GaussianHead h = GaussianHead::from_net_output(
            std::vector<double>{rng.uniform(-30, 30), rng.uniform(-25, 5)});
        const SquashedSample s =
            sample_squashed_gaussian(h, std::vector<double>{rng.normal() * 5.0});
        CHECK(std::fabs(s.action[0]) < 1.0);
        CHECK(std::isfinite(s.log_prob));
    }
}

TEST_CASE("1-D density integrates to 1 over the action grid") {
    selftest::Options opts;
    opts.suite_filter = "density";
    const auto results = selftest::run_suites(opts);
    REQUIRE(results.size() == 1);
    CHECK(results[0].passed);
    CHECK(results[0].checks >= 10);
}
