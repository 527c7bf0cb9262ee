#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rcsac {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Axis-aligned rectangle, closed on all edges.
struct Rect {
    double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
};

enum class Dynamics { linear, dubins };
enum class StartMode { fixed, uniform_free };

struct MazeSpec {
    std::string name = "maze";
    Dynamics dynamics = Dynamics::linear;
    Rect bounds{0.0, 10.0, 0.0, 10.0};
    std::vector<Rect> obstacles;
    double start_x = 1.0, start_y = 5.0;
    double start_theta = 0.0, start_v = 0.0;  // Dubins only
    double goal_x = 9.0, goal_y = 5.0;
    double goal_radius = 0.5;
    int horizon = 50;
    double dt = 1.0;
    double step_cost = 1.0;
    double goal_bonus = 100.0;
    double noise_std = 1.0;
    bool noise_in_transition = false;
    StartMode start_mode = StartMode::fixed;
    double v_max = 1.0;
    double turn_rate_max = 1.0;  // rad/s
    double accel_max = 0.5;      // m/s^2

    void validate() const;  // throws ConfigError
};

bool in_collision(const MazeSpec& spec, double x, double y);

// Euclidean distance to the nearest obstacle boundary; 0 inside or on an edge.
double obstacle_clearance(const MazeSpec& spec, double x, double y);

std::string dynamics_name(Dynamics d);
Dynamics dynamics_from_name(const std::string& s);

}  // namespace rcsac
