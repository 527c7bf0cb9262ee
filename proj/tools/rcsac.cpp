#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcsac/checkpoint.hpp"
#include "rcsac/config.hpp"
#include "rcsac/selftest.hpp"
#include "rcsac/svg.hpp"
#include "rcsac/trainer.hpp"

namespace fs = std::filesystem;
using namespace rcsac;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTestFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::string cpu_model() {
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto pos = line.find(':');
            if (pos != std::string::npos) return line.substr(pos + 2);
        }
    }
    return "unknown CPU";
}

std::vector<double> parse_deltas(const std::vector<double>& deltas) {
    for (double d : deltas)
        if (d < 0.0 || d > 1.0) throw ConfigError("delta outside [0, 1]");
    return deltas;
}

void require_file(const fs::path& p) {
    if (!fs::exists(p)) throw ConfigError("file not found: " + p.string());
}

void write_sweep_csv(const fs::path& path, const std::vector<EvalRow>& rows, bool timing) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << "delta,distance_m,steps,exec_risk,time_s,exec_risk_std\n";
    char buf[256];
    for (const EvalRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.delta,
                      r.mean_distance, r.mean_steps, r.exec_risk_mean,
                      timing ? r.time_s : 0.0, r.exec_risk_std);
        out << buf;
    }
}

void write_traces_json(const fs::path& path, const MazeSpec& spec, const std::string& ckpt_id,
                       std::uint64_t seed, const std::vector<EpisodeTrace>& traces) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["env"] = spec.name;
    doc["dynamics"] = dynamics_name(spec.dynamics);
    doc["checkpoint"] = ckpt_id;
    doc["seed"] = seed;
    nlohmann::json arr = nlohmann::json::array();
    for (const EpisodeTrace& tr : traces) {
        nlohmann::json jt;
        jt["delta"] = tr.delta;
        nlohmann::json states = nlohmann::json::array();
        for (const AgentState& s : tr.states) {
            if (spec.dynamics == Dynamics::dubins)
                states.push_back({s.x, s.y, s.theta, s.v});
            else
                states.push_back({s.x, s.y});
        }
        jt["states"] = states;
        nlohmann::json actions = nlohmann::json::array();
        for (const Action& a : tr.actions) actions.push_back({a.a0, a.a1});
        jt["actions"] = actions;
        jt["r_b"] = tr.r_b;
        jt["exec_risk"] = tr.exec_risk;
        arr.push_back(std::move(jt));
    }
    doc["traces"] = arr;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << doc.dump() << "\n";
}

void print_eval_table(const std::vector<EvalRow>& rows) {
    std::printf("host: %s (CPU only)\n", cpu_model().c_str());
    std::printf("%8s %12s %8s %10s %12s %10s\n", "delta", "distance[m]", "steps", "risk",
                "risk_std", "time[s]");
    for (const EvalRow& r : rows)
        std::printf("%8.3f %12.3f %8.1f %10.4f %12.4f %10.4f\n", r.delta, r.mean_distance,
                    r.mean_steps, r.exec_risk_mean, r.exec_risk_std, r.time_s);
}

struct EvalArgs {
    std::string checkpoint, env, out;
    std::vector<double> deltas{0.1, 0.2, 0.3};
    int episodes = 20;
    int risk_rollouts = 500;
    int risk_mc_samples = 500;
    double sigma = -1.0;  // default: maze noise_std
    std::uint64_t seed = 1;
    bool timing = false;
    std::vector<std::string> overrides;
};

void add_eval_options(CLI::App* cmd, EvalArgs& a, bool need_out) {
    cmd->add_option("--checkpoint", a.checkpoint, "checkpoint.json path")->required();
    cmd->add_option("--env", a.env, "maze config (.toml or .json)")->required();
    cmd->add_option("--deltas", a.deltas, "risk bounds to evaluate")->delimiter(',');
    cmd->add_option("--episodes", a.episodes, "evaluation episodes per delta");
    cmd->add_option("--risk-rollouts", a.risk_rollouts, "rollouts per execution-risk estimate");
    cmd->add_option("--risk-mc-samples", a.risk_mc_samples, "MC samples per immediate risk");
    cmd->add_option("--sigma", a.sigma, "state uncertainty std (default: maze noise_std)");
    cmd->add_option("--seed", a.seed, "evaluation seed");
    cmd->add_flag("--timing", a.timing, "write measured times into the CSV");
    auto* out = cmd->add_option("--out", a.out, "output directory");
    if (need_out) out->required();
    cmd->add_option("--override", a.overrides, "key=value config override (repeatable)");
}

int run_eval_like(const EvalArgs& a, bool full_sweep) {
    require_file(a.checkpoint);
    require_file(a.env);
    MazeSpec spec = load_maze_config(a.env);
    TrainConfig unused_train;
    for (const std::string& kv : a.overrides) apply_override(spec, unused_train, kv);
    const LoadedAgent loaded = load_checkpoint(a.checkpoint, spec);
    const double sigma = a.sigma >= 0.0 ? a.sigma : spec.noise_std;
    const std::vector<double> deltas = parse_deltas(a.deltas);

    std::vector<EpisodeTrace> traces;
    const std::vector<EvalRow> rows =
        evaluate(*loaded.agent, spec, deltas, a.episodes, a.risk_rollouts, a.risk_mc_samples,
                 sigma, a.seed, &traces, /*measure_time=*/true);
    print_eval_table(rows);

    if (!a.out.empty()) {
        fs::create_directories(a.out);
        write_sweep_csv(fs::path(a.out) / (full_sweep ? "sweep.csv" : "eval.csv"), rows,
                        a.timing);
        if (full_sweep) {
            write_traces_json(fs::path(a.out) / "traces.json", spec, loaded.meta.config_hash,
                              a.seed, traces);
            write_paths_svg(fs::path(a.out) / "paths.svg", spec, traces);
            std::printf("wrote %s/{sweep.csv, traces.json, paths.svg}\n", a.out.c_str());
        } else {
            std::printf("wrote %s/eval.csv\n", a.out.c_str());
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-conditioned soft actor critic for 2-D maze motion planning"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "train a policy");
    struct {
        std::string env, train, out;
        std::uint64_t seed = 0;
        bool seed_set = false;
        std::vector<std::string> overrides;
    } ta;
    train_cmd->add_option("--env", ta.env, "maze config (.toml or .json)")->required();
    train_cmd->add_option("--train", ta.train, "training config (.toml or .json)")->required();
    train_cmd->add_option("--out", ta.out, "output directory")->required();
    train_cmd->add_option("--seed", ta.seed, "master seed (overrides config)")
        ->each([&](const std::string&) { ta.seed_set = true; });
    train_cmd->add_option("--override", ta.overrides, "key=value config override (repeatable)");

    // eval / sweep
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
    EvalArgs ea;
    add_eval_options(eval_cmd, ea, /*need_out=*/false);
    auto* sweep_cmd =
        app.add_subcommand("sweep", "delta sweep with traces and SVG path plot");
    EvalArgs sa;
    add_eval_options(sweep_cmd, sa, /*need_out=*/true);

    // selftest
    auto* self_cmd = app.add_subcommand("selftest", "run the oracle property suites");
    selftest::Options so;
    self_cmd->add_option("--suite", so.suite_filter, "run only suites matching this substring");
    self_cmd->add_option("--mutate", so.mutation,
                         "inject a known defect (negative-control fixture)");
    self_cmd->add_option("--seed", so.seed, "suite seed");
    self_cmd->add_option("--gradient-seeds", so.gradient_seeds, "seeds for the gradient suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*train_cmd) {
            require_file(ta.env);
            require_file(ta.train);
            MazeSpec spec = load_maze_config(ta.env);
            TrainConfig cfg = load_train_config(ta.train);
            for (const std::string& kv : ta.overrides) apply_override(spec, cfg, kv);
            if (ta.seed_set) cfg.seed = ta.seed;
            const TrainResult res = train(cfg, spec, ta.out);
            std::printf("trained %d epochs; checkpoint: %s\n", res.epochs_run,
                        res.checkpoint_path.string().c_str());
            return kExitOk;
        }
        if (*eval_cmd) return run_eval_like(ea, /*full_sweep=*/false);
        if (*sweep_cmd) return run_eval_like(sa, /*full_sweep=*/true);
        if (*self_cmd) {
            const auto results = selftest::run_suites(so);
            bool all_ok = true;
            for (const auto& r : results) {
                std::printf("[%s] suite %-10s %d checks\n", r.passed ? "PASS" : "FAIL",
                            r.name.c_str(), r.checks);
                if (!r.passed) {
                    std::printf("       first failure: %s\n", r.first_failure.c_str());
                    all_ok = false;
                }
            }
            if (results.empty()) {
                std::fprintf(stderr, "no suite matches '%s'\n", so.suite_filter.c_str());
                return kExitUsage;
            }
            return all_ok ? kExitOk : kExitTestFailure;
        }
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return kExitNumerical;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
