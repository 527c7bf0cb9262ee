#include "rcsac/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace rcsac {

namespace {

using nlohmann::json;

json layers_to_json(const std::vector<Layer>& layers) {
    json arr = json::array();
    for (const Layer& l : layers)
        arr.push_back({{"in", l.in}, {"out", l.out}, {"w", l.w}, {"b", l.b}});
    return arr;
}

std::vector<Layer> layers_from_json(const json& arr) {
    std::vector<Layer> layers;
    for (const json& jl : arr) {
        Layer l;
        l.in = jl.at("in").get<int>();
        l.out = jl.at("out").get<int>();
        l.w = jl.at("w").get<std::vector<double>>();
        l.b = jl.at("b").get<std::vector<double>>();
        if (l.w.size() != static_cast<std::size_t>(l.in) * l.out ||
            l.b.size() != static_cast<std::size_t>(l.out))
            throw ConfigError("checkpoint: layer shape mismatch");
        layers.push_back(std::move(l));
    }
    return layers;
}

json net_to_json(const Mlp& net) {
    return {{"output", net.out_act == OutputActivation::sigmoid ? "sigmoid" : "linear"},
            {"layers", layers_to_json(net.layers)}};
}

Mlp net_from_json(const json& j) {
    Mlp net;
    net.out_act = j.at("output").get<std::string>() == "sigmoid" ? OutputActivation::sigmoid
                                                                 : OutputActivation::linear;
    net.layers = layers_from_json(j.at("layers"));
    return net;
}

json adam_to_json(const AdamState& st) {
    return {{"t", st.t},       {"beta1", st.beta1}, {"beta2", st.beta2},
            {"eps", st.eps},   {"m", layers_to_json(st.m)},
            {"v", layers_to_json(st.v)}};
}

AdamState adam_from_json(const json& j) {
    AdamState st;
    st.t = j.at("t").get<long>();
    st.beta1 = j.at("beta1").get<double>();
    st.beta2 = j.at("beta2").get<double>();
    st.eps = j.at("eps").get<double>();
    st.m = layers_from_json(j.at("m"));
    st.v = layers_from_json(j.at("v"));
    return st;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Agent& agent,
                     const CheckpointMeta& meta) {
    json doc;
    doc["schema_version"] = 1;
    doc["metadata"] = {{"config_hash", meta.config_hash},
                       {"epoch", meta.epoch},
                       {"seed", meta.seed},
                       {"env_name", meta.env_name},
                       {"dynamics", meta.dynamics},
                       {"hidden_dim", meta.hidden_dim},
                       {"state_dim", meta.state_dim},
                       {"delta_in_critics", meta.delta_in_critics},
                       {"alpha", meta.alpha},
                       {"gamma", meta.gamma}};
    doc["networks"] = {{"policy", net_to_json(agent.policy)},
                       {"q1", net_to_json(agent.q1)},
                       {"q2", net_to_json(agent.q2)},
                       {"q1_target", net_to_json(agent.q1_target)},
                       {"q2_target", net_to_json(agent.q2_target)},
                       {"risk", net_to_json(agent.risk)},
                       {"risk_target", net_to_json(agent.risk_target)}};
    doc["optimizer"] = {{"policy", adam_to_json(agent.opt_policy)},
                        {"q1", adam_to_json(agent.opt_q1)},
                        {"q2", adam_to_json(agent.opt_q2)},
                        {"risk", adam_to_json(agent.opt_risk)}};

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write checkpoint: " + path.string());
    out << doc.dump();
    out << "\n";
}

LoadedAgent load_checkpoint(const std::filesystem::path& path, const MazeSpec& spec) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read checkpoint: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("malformed checkpoint " + path.string() + ": " + e.what());
    }
    try {
        const json& md = doc.at("metadata");
        CheckpointMeta meta;
        meta.config_hash = md.at("config_hash").get<std::string>();
        meta.epoch = md.at("epoch").get<int>();
        meta.seed = md.at("seed").get<std::uint64_t>();
        meta.env_name = md.at("env_name").get<std::string>();
        meta.dynamics = md.at("dynamics").get<std::string>();
        meta.hidden_dim = md.at("hidden_dim").get<int>();
        meta.state_dim = md.at("state_dim").get<int>();
        meta.delta_in_critics = md.at("delta_in_critics").get<bool>();
        meta.alpha = md.at("alpha").get<double>();
        meta.gamma = md.at("gamma").get<double>();

        if (meta.dynamics != dynamics_name(spec.dynamics))
            throw ConfigError("checkpoint dynamics '" + meta.dynamics +
                              "' does not match maze dynamics '" +
                              dynamics_name(spec.dynamics) + "'");
        if (meta.state_dim != state_feature_dim(spec))
            throw ConfigError("checkpoint state_dim does not match maze");

        AgentConfig cfg;
        cfg.hidden_dim = meta.hidden_dim;
        cfg.alpha = meta.alpha;
        cfg.gamma = meta.gamma;
        cfg.delta_in_critics = meta.delta_in_critics;
        RngStream dummy(0);
        auto agent = std::make_unique<Agent>(spec, cfg, dummy);

        const json& nets = doc.at("networks");
        agent->policy = net_from_json(nets.at("policy"));
        agent->q1 = net_from_json(nets.at("q1"));
        agent->q2 = net_from_json(nets.at("q2"));
        agent->q1_target = net_from_json(nets.at("q1_target"));
        agent->q2_target = net_from_json(nets.at("q2_target"));
        agent->risk = net_from_json(nets.at("risk"));
        agent->risk_target = net_from_json(nets.at("risk_target"));
        const json& opt = doc.at("optimizer");
        agent->opt_policy = adam_from_json(opt.at("policy"));
        agent->opt_q1 = adam_from_json(opt.at("q1"));
        agent->opt_q2 = adam_from_json(opt.at("q2"));
        agent->opt_risk = adam_from_json(opt.at("risk"));

        if (agent->policy.input_dim() != agent->policy_input_dim() ||
            agent->q1.input_dim() != agent->critic_input_dim())
            throw ConfigError("checkpoint network dims do not match maze/agent config");

        return {std::move(agent), meta};
    } catch (const json::exception& e) {
        throw ConfigError("malformed checkpoint " + path.string() + ": " + e.what());
    }
}

}  // namespace rcsac
