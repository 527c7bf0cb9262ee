#include "rcsac/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace rcsac {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void dump_nan_batch(const std::filesystem::path& path, const Agent& agent,
                    const UpdateDiagnostics& diag, long global_update) {
    nlohmann::json doc;
    doc["update_index"] = global_update;
    doc["losses"] = {{"q1_loss", diag.q1_loss},
                     {"q2_loss", diag.q2_loss},
                     {"risk_loss", diag.risk_loss},
                     {"policy_loss", diag.policy_loss}};
    nlohmann::json items = nlohmann::json::array();
    for (const Transition* t : agent.last_batch()) {
        items.push_back({{"s", {t->s.x, t->s.y, t->s.theta, t->s.v}},
                         {"a", {t->a.a0, t->a.a1}},
                         {"reward", t->reward},
                         {"r_b", t->r_b},
                         {"delta", t->delta},
                         {"s_next", {t->s_next.x, t->s_next.y, t->s_next.theta, t->s_next.v}},
                         {"done", t->done}});
    }
    doc["batch"] = items;
    std::ofstream out(path);
    out << doc.dump(2) << "\n";
}

}  // namespace

SeedRegistry seed_everything(std::uint64_t master_seed) { return SeedRegistry(master_seed); }

EpisodeTrace rollout_trace(const Agent& agent, const MazeSpec& spec, double delta,
                           int risk_mc_samples, double sigma, RngStream& rng,
                           double* inference_seconds) {
    EpisodeTrace tr;
    tr.delta = delta;
    AgentState s = env_reset(spec, rng);
    tr.states.push_back(s);
    tr.r_b.push_back(immediate_risk_mc(spec, s, sigma, risk_mc_samples, rng));
    double infer_s = 0.0;
    for (int t = 0; t < spec.horizon; ++t) {
        const auto t0 = Clock::now();
        const Action a = agent.select_action(s, delta, /*stochastic=*/false, rng);
        infer_s += seconds_since(t0);
        const StepResult res = env_step(spec, s, a, t);
        tr.actions.push_back(a);
        tr.rewards.push_back(res.reward);
        tr.distance += std::hypot(res.next.x - s.x, res.next.y - s.y);
        s = res.next;
        tr.states.push_back(s);
        tr.r_b.push_back(immediate_risk_mc(spec, s, sigma, risk_mc_samples, rng));
        if (res.done) {
            tr.done_reason = res.reason;
            break;
        }
    }
    tr.steps = static_cast<int>(tr.actions.size());
    if (tr.done_reason == DoneReason::none) tr.done_reason = DoneReason::horizon;
    tr.exec_risk = execution_risk_exact(tr.r_b);
    if (inference_seconds) *inference_seconds = infer_s;
    return tr;
}

std::vector<EvalRow> evaluate(const Agent& agent, const MazeSpec& spec,
                              std::span<const double> deltas, int episodes_per_delta,
                              int risk_rollouts, int risk_mc_samples, double sigma,
                              std::uint64_t eval_seed, std::vector<EpisodeTrace>* traces,
                              bool measure_time) {
    for (double d : deltas)
        if (!(d >= 0.0 && d <= 1.0))
            throw ConfigError("evaluation delta outside [0, 1]: " + std::to_string(d));
    const SeedRegistry reg(eval_seed);
    std::vector<EvalRow> rows;
    rows.reserve(deltas.size());
    const PolicyFn policy_fn = [&](const AgentState& s, double delta) {
        thread_local RngStream unused(0);
        return agent.select_action(s, delta, /*stochastic=*/false, unused);
    };

    for (std::size_t di = 0; di < deltas.size(); ++di) {
        const double delta = deltas[di];
        EvalRow row;
        row.delta = delta;
        double infer_total = 0.0;
        for (int ep = 0; ep < episodes_per_delta; ++ep) {
            RngStream rng = reg.stream("eval-episode", di * 100003ULL + ep);
            double infer_s = 0.0;
            const EpisodeTrace tr =
                rollout_trace(agent, spec, delta, risk_mc_samples, sigma, rng, &infer_s);
            row.mean_steps += tr.steps;
            row.mean_distance += tr.distance;
            row.goal_rate += tr.done_reason == DoneReason::goal ? 1.0 : 0.0;
            infer_total += infer_s;
            if (ep == 0 && traces) traces->push_back(tr);
        }
        row.mean_steps /= episodes_per_delta;
        row.mean_distance /= episodes_per_delta;
        row.goal_rate /= episodes_per_delta;
        row.time_s = measure_time ? infer_total / episodes_per_delta : 0.0;

        ExecRiskOptions opts;
        opts.n_rollouts = risk_rollouts;
        opts.mc_samples_per_step = risk_mc_samples;
        opts.sigma = sigma;
        const ExecRiskResult er =
            policy_execution_risk_mc(spec, policy_fn, delta, opts, reg.derive("eval-risk", di));
        row.exec_risk_mean = er.mean;
        row.exec_risk_std = er.stddev;
        rows.push_back(row);
    }
    return rows;
}

TrainResult train(const TrainConfig& cfg, const MazeSpec& spec,
                  const std::filesystem::path& out_dir, const StepObserver& observer) {
    cfg.validate();
    spec.validate();
    std::filesystem::create_directories(out_dir);

    const std::string resolved = resolved_config_toml(spec, cfg);
    {
        std::ofstream rc(out_dir / "resolved.toml");
        if (!rc) throw ConfigError("cannot write " + (out_dir / "resolved.toml").string());
        rc << resolved;
    }
    const std::string hash = config_hash(resolved);

    const SeedRegistry reg = seed_everything(cfg.seed);
    RngStream init_rng = reg.stream("init");
    RngStream env_rng = reg.stream("env");
    RngStream policy_rng = reg.stream("policy");
    RngStream buffer_rng = reg.stream("buffer");
    RngStream delta_rng = reg.stream("delta");
    RngStream update_rng = reg.stream("update");

    AgentConfig acfg;
    acfg.hidden_dim = cfg.hidden_dim;
    acfg.alpha = cfg.alpha;
    acfg.gamma = cfg.gamma;
    acfg.tau = cfg.tau;
    acfg.lr = cfg.lr;
    acfg.lambda_er = cfg.lambda_er;
    acfg.delta_in_critics = cfg.delta_in_critics;
    Agent agent(spec, acfg, init_rng);

    CheckpointMeta meta;
    meta.config_hash = hash;
    meta.seed = cfg.seed;
    meta.env_name = spec.name;
    meta.dynamics = dynamics_name(spec.dynamics);
    meta.hidden_dim = cfg.hidden_dim;
    meta.state_dim = state_feature_dim(spec);
    meta.delta_in_critics = cfg.delta_in_critics;
    meta.alpha = cfg.alpha;
    meta.gamma = cfg.gamma;

    const std::filesystem::path ckpt_path = out_dir / "checkpoint.json";
    const std::filesystem::path log_path = out_dir / "log.csv";
    std::ofstream log(log_path);
    if (!log) throw ConfigError("cannot write " + log_path.string());
    log << "epoch,q_loss,risk_loss,policy_loss,mean_q,mean_risk_estimate,"
           "eval_steps,eval_distance,eval_exec_risk,wall_time_s\n";

    ReplayBuffer buffer(cfg.buffer_capacity);
    AgentState state;
    int t_in_episode = 0;
    double episode_delta = 0.0;
    bool episode_open = false;
    long global_step = 0;
    long global_update = 0;

    save_checkpoint(ckpt_path, agent, meta);  // epoch-0 snapshot

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto epoch_t0 = Clock::now();

        for (int es = 0; es < cfg.env_steps_per_epoch; ++es) {
            if (!episode_open) {
                state = env_reset(spec, env_rng);
                episode_delta = delta_rng.uniform(cfg.delta_lo, cfg.delta_hi);
                t_in_episode = 0;
                episode_open = true;
            }
            Action a;
            if (global_step < cfg.warmup_steps) {
                a = {policy_rng.uniform(-1.0, 1.0), policy_rng.uniform(-1.0, 1.0)};
            } else {
                a = agent.select_action(state, episode_delta, /*stochastic=*/true, policy_rng);
            }
            RngStream risk_rng = reg.stream("risk-mc", static_cast<std::uint64_t>(global_step));
            const double rb =
                immediate_risk_mc(spec, state, spec.noise_std, cfg.risk_mc_samples, risk_rng);
            const StepResult res = env_step(spec, state, a, t_in_episode, &env_rng);

            Transition tr;
            tr.s = state;
            tr.a = a;
            tr.reward = res.reward;
            tr.r_b = rb;
            tr.delta = episode_delta;
            tr.s_next = res.next;
            tr.done = res.done;
            buffer.push(tr);
            if (observer) observer(global_step, tr);

            state = res.next;
            ++t_in_episode;
            ++global_step;
            if (res.done) episode_open = false;
        }

        double q_loss_sum = 0, risk_loss_sum = 0, policy_loss_sum = 0;
        double mean_q_sum = 0, mean_risk_sum = 0;
        int updates_done = 0;
        for (int gs = 0; gs < cfg.grad_steps_per_epoch; ++gs) {
            const UpdateDiagnostics diag =
                agent.update_step(buffer, cfg.batch_size, buffer_rng, update_rng);
            ++global_update;
            if (diag.skipped) continue;
            if (!diag.finite()) {
                const auto dump = out_dir / "nan_dump.json";
                dump_nan_batch(dump, agent, diag, global_update);
                throw NumericalError("non-finite loss at update " + std::to_string(global_update) +
                                     "; offending batch dumped to " + dump.string());
            }
            q_loss_sum += 0.5 * (diag.q1_loss + diag.q2_loss);
            risk_loss_sum += diag.risk_loss;
            policy_loss_sum += diag.policy_loss;
            mean_q_sum += diag.mean_q;
            mean_risk_sum += diag.mean_risk;
            ++updates_done;
        }
        const double n = std::max(updates_done, 1);

        std::string eval_steps_s, eval_dist_s, eval_risk_s;
        const bool eval_epoch = (epoch % cfg.eval_interval == 0) || epoch == cfg.epochs;
        if (eval_epoch) {
            const double deltas[1] = {cfg.eval_delta};
            const std::vector<EvalRow> rows = evaluate(
                agent, spec, deltas, cfg.eval_episodes, cfg.eval_episodes, cfg.risk_mc_samples,
                spec.noise_std, reg.derive("eval", static_cast<std::uint64_t>(epoch)), nullptr,
                /*measure_time=*/false);
            eval_steps_s = fmt(rows[0].mean_steps);
            eval_dist_s = fmt(rows[0].mean_distance);
            eval_risk_s = fmt(rows[0].exec_risk_mean);
            meta.epoch = epoch;
            save_checkpoint(ckpt_path, agent, meta);
        }

        const double wall = cfg.timing ? seconds_since(epoch_t0) : 0.0;
        log << epoch << ',' << fmt(q_loss_sum / n) << ',' << fmt(risk_loss_sum / n) << ','
            << fmt(policy_loss_sum / n) << ',' << fmt(mean_q_sum / n) << ','
            << fmt(mean_risk_sum / n) << ',' << eval_steps_s << ',' << eval_dist_s << ','
            << eval_risk_s << ',' << fmt(wall) << "\n";
        log.flush();
    }

    meta.epoch = cfg.epochs;
    save_checkpoint(ckpt_path, agent, meta);
    return {ckpt_path, log_path, cfg.epochs};
}

}  // namespace rcsac
