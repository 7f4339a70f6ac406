#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "placenav/geometry.hpp"

namespace placenav {

struct Segment {
    Vec2 a;
    Vec2 b;
};

struct Pose {
    Vec2 position;
    double heading = 0.0;  // radians
};

/// Arena geometry in metres. Boundary walls are implicit at the arena edges;
/// `obstacles` holds only the interior segments.
struct EnvironmentSpec {
    std::string name;
    double width = 0.0;
    double height = 0.0;
    std::vector<Segment> obstacles;
    Vec2 goal_center;
    double goal_radius = 0.0;
    Pose start;

    bool contains(Vec2 p) const;
    double diagonal() const { return std::hypot(width, height); }
    /// The four boundary walls followed by the obstacles.
    std::vector<Segment> all_segments() const;
    /// Throws EnvironmentError naming the offending field.
    void validate() const;
};

struct AgentState {
    Vec2 position;
    double heading = 0.0;  // radians in [0, 2pi)
    Vec2 velocity;         // displacement of the last step, m/step
};

struct LidarScan {
    std::vector<double> ranges;
    std::vector<double> bearings;  // allocentric
    double max_range = 0.0;

    std::size_t size() const { return ranges.size(); }
};

class EnvironmentError : public std::runtime_error {
public:
    EnvironmentError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class InvalidStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultCollisionMargin = 0.1;

/// Distance along the ray origin + t*dir (dir unit length) to the segment, or
/// +inf when the ray misses.
double ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& s);
double point_segment_distance(Vec2 p, const Segment& s);

/// Beam j points along 2*pi*j/n_res. max_range <= 0 selects the arena diagonal.
LidarScan raycast(const EnvironmentSpec& env, const AgentState& state, int n_res,
                  double max_range = 0.0);

/// Moves step_len along `heading`, stopping `margin` short of any wall or
/// obstacle. The heading is kept even when the move is clamped.
AgentState step_agent(const EnvironmentSpec& env, const AgentState& state, double heading,
                      double step_len, double margin = kDefaultCollisionMargin);

bool in_goal(const AgentState& state, const EnvironmentSpec& env);

EnvironmentSpec parse_environment(std::string_view text, std::string name = {});
EnvironmentSpec load_environment(const std::filesystem::path& path);

}  // namespace placenav
