#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "rcsac/maze.hpp"
#include "rcsac/trainer.hpp"

namespace rcsac {

// Maze geometry plus one polyline per trace, color-coded by delta.
// Obstacles are the only <rect> elements; the boundary is a <path>.
void write_paths_svg(const std::filesystem::path& path, const MazeSpec& spec,
                     const std::vector<EpisodeTrace>& traces);

}  // namespace rcsac
