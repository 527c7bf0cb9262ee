#include "rcsac/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "rcsac/gaussian.hpp"
#include "rcsac/oracles.hpp"
#include "rcsac/risk.hpp"

namespace rcsac::selftest {

namespace {

class Suite {
public:
    explicit Suite(std::string name) { result_.name = std::move(name); }

    void check(bool ok, const std::string& what) {
        ++result_.checks;
        if (!ok && result_.passed) {
            result_.passed = false;
            result_.first_failure = what;
        }
    }

    void check_close(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os << what << ": got " << got << ", want " << want << " (tol " << tol << ")";
        check(std::fabs(got - want) <= tol, os.str());
    }

    SuiteResult result() const { return result_; }

private:
    SuiteResult result_;
};

using ErFn = std::function<double(std::span<const double>)>;

SuiteResult recursion_suite(const Options& opts) {
    Suite suite("recursion");
    ErFn er = [](std::span<const double> rb) { return execution_risk_exact(rb); };
    if (opts.mutation == "recursion-sign") {
        // Negative control: sign error in the survival factor.
        er = [](std::span<const double> rb) {
            double e = 0.0;
            for (std::size_t i = rb.size(); i-- > 0;) e = rb[i] - (1.0 - rb[i]) * e;
            return e;
        };
    }

    RngStream rng(opts.seed);
    for (int rep = 0; rep < 1000; ++rep) {
        const int T = 1 + static_cast<int>(rng.uniform_index(0, 9));
        std::vector<double> rb(T);
        for (double& v : rb) v = rng.uniform();
        const double got = er(rb);
        const double want = bernoulli_any_event_prob(rb);
        suite.check_close(got, want, 1e-12, "recursion vs enumeration");
        double prod = 1.0;
        for (double v : rb) prod *= 1.0 - v;
        suite.check_close(got, 1.0 - prod, 1e-12, "recursion vs survival product");
    }
    for (int rep = 0; rep < 10000; ++rep) {
        const int T = 1 + static_cast<int>(rng.uniform_index(0, 19));
        std::vector<double> rb(T);
        int nonzero = 0;
        for (double& v : rb) {
            v = rng.uniform() < 0.3 ? rng.uniform() : 0.0;
            if (v > 0.0) ++nonzero;
        }
        const double exact = er(rb);
        const double approx = execution_risk_sum_approx(rb);
        suite.check(approx >= exact - 1e-15, "sum approximation is an upper bound");
        if (nonzero <= 1)
            suite.check_close(exact, approx, 1e-15, "equality with <= 1 nonzero entry");
        else
            suite.check(approx > exact, "strict inequality with >= 2 nonzero entries");
    }
    return suite.result();
}

SuiteResult risk_mc_suite(const Options& opts) {
    Suite suite("risk-mc");
    MazeSpec spec;
    spec.name = "selftest";
    spec.obstacles = {{4.0, 6.0, 4.0, 6.0}};
    spec.validate();
    const AgentState s{5.0, 5.0, 0.0, 0.0};
    const double want = analytic_rect_prob(spec.obstacles[0], s.x, s.y, 1.0);

    int ok = 0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        RngStream rng(opts.seed + rep);
        const double got = immediate_risk_mc(spec, s, 1.0, 10000, rng);
        if (std::fabs(got - want) <= 0.015) ++ok;
    }
    suite.check(ok >= reps - 1, "MC estimate within 0.015 of the analytic value");

    RngStream r1(opts.seed), r2(opts.seed);
    suite.check(immediate_risk_mc(spec, s, 1.0, 2000, r1) ==
                    immediate_risk_mc(spec, s, 1.0, 2000, r2),
                "seeded MC risk is bit-reproducible");
    return suite.result();
}

SuiteResult gradient_suite(const Options& opts) {
    Suite suite("gradients");
    for (int rep = 0; rep < opts.gradient_seeds; ++rep) {
        const std::uint64_t seed = opts.seed + 100 + rep;
        for (double lambda : {0.0, 10.0}) {
            auto agent = make_test_agent(seed, lambda);
            // delta = 0 keeps the risk penalty strictly active, delta = 1
            // keeps it strictly inactive; both sides of the ReLU get probed.
            for (double fixed_delta : {0.0, 1.0}) {
                const std::vector<Transition> batch =
                    make_synthetic_batch(agent->spec(), 4, seed ^ 0x9e37, fixed_delta);
                std::vector<const Transition*> refs;
                for (const Transition& t : batch) refs.push_back(&t);

                RngStream nrng(seed ^ 0xabcd);
                std::vector<NoiseRow> noise(refs.size());
                for (NoiseRow& row : noise)
                    for (double& v : row) v = nrng.normal();

                Grads g1 = Grads::like(agent->q1), g2 = Grads::like(agent->q2);
                Grads gr = Grads::like(agent->risk), gp = Grads::like(agent->policy);
                UpdateDiagnostics diag;
                agent->q_loss(refs, noise, g1, g2, diag);
                agent->risk_critic_loss(refs, noise, gr, diag);
                const double ploss = agent->policy_loss(refs, noise, gp);
                suite.check(std::isfinite(ploss), "policy loss finite");

                auto fd_check = [&](Mlp& net, const Grads& analytic,
                                    const std::function<double()>& loss, const char* what) {
                    const std::vector<double> fd = finite_difference_grad(net, loss);
                    const std::vector<double> an = grads_flat(analytic);
                    std::ostringstream os;
                    os << what << " (lambda=" << lambda << ", delta=" << fixed_delta
                       << ", seed=" << seed << "): rel err " << max_rel_err(an, fd);
                    suite.check(max_rel_err(an, fd) <= 1e-4, os.str());
                };

                UpdateDiagnostics d2;
                fd_check(agent->q1, g1,
                         [&] {
                             Grads t1 = Grads::like(agent->q1), t2 = Grads::like(agent->q2);
                             agent->q_loss(refs, noise, t1, t2, d2);
                             return d2.q1_loss + d2.q2_loss;
                         },
                         "q_loss grad wrt q1");
                fd_check(agent->risk, gr,
                         [&] {
                             Grads t = Grads::like(agent->risk);
                             agent->risk_critic_loss(refs, noise, t, d2);
                             return d2.risk_loss;
                         },
                         "risk_critic_loss grad wrt risk net");
                fd_check(agent->policy, gp,
                         [&] {
                             Grads t = Grads::like(agent->policy);
                             return agent->policy_loss(refs, noise, t);
                         },
                         "policy_loss grad wrt policy net");
            }
        }
    }
    return suite.result();
}

SuiteResult density_suite(const Options& opts) {
    Suite suite("density");
    RngStream rng(opts.seed + 7);
    const int grid_n = 10000;
    for (int rep = 0; rep < 10; ++rep) {
        GaussianHead head;
        head.mean = {rng.uniform(-1.0, 1.0)};
        head.log_std = {rng.uniform(-1.0, 0.3)};
        head.raw_log_std = head.log_std;
        const double sigma = std::exp(head.log_std[0]);

        double integral = 0.0;
        const double da = 2.0 / grid_n;
        for (int k = 0; k < grid_n; ++k) {
            const double a = -1.0 + (k + 0.5) * da;
            const double u = 0.5 * std::log((1.0 + a) / (1.0 - a));  // atanh
            const double noise[1] = {(u - head.mean[0]) / sigma};
            const SquashedSample smp = sample_squashed_gaussian(head, noise);
            integral += std::exp(smp.log_prob) * da;
        }
        std::ostringstream os;
        os << "density integral (mean=" << head.mean[0] << ", log_std=" << head.log_std[0]
           << "): " << integral;
        suite.check(std::fabs(integral - 1.0) <= 1e-3, os.str());
    }
    return suite.result();
}

}  // namespace

MazeSpec test_maze() {
    MazeSpec spec;
    spec.name = "selftest";
    spec.obstacles = {{4.0, 6.0, 3.0, 7.0}};
    spec.validate();
    return spec;
}

std::unique_ptr<Agent> make_test_agent(std::uint64_t seed, double lambda_er,
                                       bool delta_in_critics, int hidden) {
    AgentConfig cfg;
    cfg.hidden_dim = hidden;
    cfg.lambda_er = lambda_er;
    cfg.delta_in_critics = delta_in_critics;
    RngStream rng(seed);
    return std::make_unique<Agent>(test_maze(), cfg, rng);
}

std::vector<Transition> make_synthetic_batch(const MazeSpec& spec, std::size_t n,
                                             std::uint64_t seed, double fixed_delta) {
    RngStream rng(seed);
    std::vector<Transition> batch(n);
    for (std::size_t i = 0; i < n; ++i) {
        Transition& t = batch[i];
        t.s = {rng.uniform(spec.bounds.x_min, spec.bounds.x_max),
               rng.uniform(spec.bounds.y_min, spec.bounds.y_max), 0.0, 0.0};
        t.s_next = {rng.uniform(spec.bounds.x_min, spec.bounds.x_max),
                    rng.uniform(spec.bounds.y_min, spec.bounds.y_max), 0.0, 0.0};
        t.a = {rng.uniform(-0.99, 0.99), rng.uniform(-0.99, 0.99)};
        t.reward = rng.uniform(-1.0, 1.0);
        t.r_b = rng.uniform();
        t.delta = fixed_delta >= 0.0 ? fixed_delta : rng.uniform();
        t.done = (i % 4 == 3);
    }
    return batch;
}

std::vector<SuiteResult> run_suites(const Options& opts) {
    std::vector<SuiteResult> results;
    auto wanted = [&](const std::string& name) {
        return opts.suite_filter.empty() || name.find(opts.suite_filter) != std::string::npos;
    };
    if (wanted("recursion")) results.push_back(recursion_suite(opts));
    if (wanted("risk-mc")) results.push_back(risk_mc_suite(opts));
    if (wanted("gradients")) results.push_back(gradient_suite(opts));
    if (wanted("density")) results.push_back(density_suite(opts));
    return results;
}

}  // namespace rcsac::selftest
