#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rcsac/maze.hpp"
#include "rcsac/trainer_config.hpp"

namespace rcsac {

// Minimal typed value model shared by the TOML and JSON front ends.
struct ConfigValue {
    enum class Kind { boolean, number, string, array };
    Kind kind = Kind::number;
    bool b = false;
    double num = 0.0;
    std::string str;
    std::vector<ConfigValue> arr;
};

using ConfigTable = std::map<std::string, ConfigValue>;

// TOML subset: key = value pairs, [section] headers (flattened to
// "section.key"), strings, numbers, booleans, nested arrays, # comments.
ConfigTable parse_toml(const std::string& text);

// Dispatches on extension: .toml or .json.
ConfigTable parse_config_file(const std::filesystem::path& path);

// Accepts flat tables or tables with an "env."/"train." prefix (the format
// written by resolved snapshots).
MazeSpec maze_from_table(const ConfigTable& table);
TrainConfig train_from_table(const ConfigTable& table);

MazeSpec load_maze_config(const std::filesystem::path& path);
TrainConfig load_train_config(const std::filesystem::path& path);

// "key=value" override applied to whichever schema owns the key.
// Throws ConfigError for unknown or non-overridable keys.
void apply_override(MazeSpec& maze, TrainConfig& train, const std::string& kv);

// Canonical resolved snapshot ([env] and [train] sections); reparseable.
std::string resolved_config_toml(const MazeSpec& maze, const TrainConfig& train);

// FNV-1a over the resolved snapshot, as a 16-digit hex string.
std::string config_hash(const std::string& resolved_toml);

}  // namespace rcsac
