#include "rcsac/maze.hpp"

#include <algorithm>
#include <cmath>

namespace rcsac {

void MazeSpec::validate() const {
    if (bounds.x_min >= bounds.x_max || bounds.y_min >= bounds.y_max)
        throw ConfigError(name + ": degenerate bounds");
    for (const Rect& r : obstacles) {
        if (r.x_min > r.x_max || r.y_min > r.y_max)
            throw ConfigError(name + ": degenerate obstacle");
        if (r.x_min < bounds.x_min || r.x_max > bounds.x_max || r.y_min < bounds.y_min ||
            r.y_max > bounds.y_max)
            throw ConfigError(name + ": obstacle outside bounds");
        if (r.contains(goal_x, goal_y))
            throw ConfigError(name + ": goal inside an obstacle");
    }
    if (goal_radius <= 0.0) throw ConfigError(name + ": goal_radius must be > 0");
    if (horizon < 1) throw ConfigError(name + ": horizon must be >= 1");
    if (dt <= 0.0) throw ConfigError(name + ": dt must be > 0");
    if (v_max <= 0.0) throw ConfigError(name + ": v_max must be > 0");
    if (noise_std < 0.0) throw ConfigError(name + ": noise_std must be >= 0");
    if (!bounds.contains(goal_x, goal_y)) throw ConfigError(name + ": goal outside bounds");
}

bool in_collision(const MazeSpec& spec, double x, double y) {
    for (const Rect& r : spec.obstacles)
        if (r.contains(x, y)) return true;
    return false;
}

double obstacle_clearance(const MazeSpec& spec, double x, double y) {
    double best = std::numeric_limits<double>::infinity();
    for (const Rect& r : spec.obstacles) {
        const double dx = std::max({r.x_min - x, 0.0, x - r.x_max});
        const double dy = std::max({r.y_min - y, 0.0, y - r.y_max});
        best = std::min(best, std::hypot(dx, dy));
    }
    return spec.obstacles.empty() ? std::numeric_limits<double>::infinity() : best;
}

std::string dynamics_name(Dynamics d) {
    return d == Dynamics::linear ? "linear" : "dubins";
}

Dynamics dynamics_from_name(const std::string& s) {
    if (s == "linear") return Dynamics::linear;
    if (s == "dubins") return Dynamics::dubins;
    throw ConfigError("unknown dynamics '" + s + "' (expected linear|dubins)");
}

}  // namespace rcsac
