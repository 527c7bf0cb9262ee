#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "rcsac/agent.hpp"

namespace rcsac {

struct CheckpointMeta {
    std::string config_hash;
    int epoch = 0;
    std::uint64_t seed = 0;
    std::string env_name;
    std::string dynamics;
    int hidden_dim = 0;
    int state_dim = 0;
    bool delta_in_critics = true;
    double alpha = 0.2, gamma = 0.99;
};

// One JSON document per agent: named networks with layer shapes and flat
// row-major f64 arrays, Adam states, and the metadata block.
void save_checkpoint(const std::filesystem::path& path, const Agent& agent,
                     const CheckpointMeta& meta);

struct LoadedAgent {
    std::unique_ptr<Agent> agent;
    CheckpointMeta meta;
};

// Validates dynamics and feature dimensions against `spec`; throws
// ConfigError on mismatch or malformed documents.
LoadedAgent load_checkpoint(const std::filesystem::path& path, const MazeSpec& spec);

}  // namespace rcsac
