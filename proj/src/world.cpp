#include "placenav/world.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace placenav {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParallelEps = 1e-15;
constexpr double kEndpointSlack = 1e-12;

// Smallest t >= 0 at which origin + t*dir comes within `margin` of the
// segment. A start already inside the margin only counts when the move
// does not increase the clearance.
double capsule_entry(Vec2 origin, Vec2 dir, const Segment& seg, double margin) {
    const double d0 = point_segment_distance(origin, seg);
    if (d0 <= margin) {
        const double probe = point_segment_distance(origin + dir * 1e-7, seg);
        return probe >= d0 ? kInf : 0.0;
    }

    double best = kInf;
    const Vec2 e = seg.b - seg.a;
    const double len = e.norm();
    if (len > 0.0) {
        const Vec2 along = e * (1.0 / len);
        const Vec2 normal{-along.y, along.x};
        const double h0 = (origin - seg.a).dot(normal);
        const double hd = dir.dot(normal);
        if (std::abs(hd) > kParallelEps) {
            for (double offset : {margin, -margin}) {
                const double t = (offset - h0) / hd;
                if (t < 0.0) continue;
                const double s = (origin + dir * t - seg.a).dot(along);
                if (s >= 0.0 && s <= len) best = std::min(best, t);
            }
        }
    }
    for (Vec2 c : {seg.a, seg.b}) {
        const Vec2 oc = origin - c;
        const double b = dir.dot(oc);
        const double cc = oc.dot(oc) - margin * margin;
        const double disc = b * b - cc;
        if (disc < 0.0) continue;
        const double t = -b - std::sqrt(disc);
        if (t >= 0.0) best = std::min(best, t);
    }
    return best;
}

std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    std::string out = pos == std::string::npos ? line : line.substr(0, pos);
    std::replace(out.begin(), out.end(), ',', ' ');
    return out;
}

std::vector<double> read_numbers(std::istringstream& in, std::size_t count, const std::string& key,
                                 int line_no) {
    std::vector<double> values;
    double v = 0.0;
    while (in >> v) values.push_back(v);
    if (!in.eof() || values.size() != count) {
        throw EnvironmentError(key, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(count) + " numbers");
    }
    return values;
}

}  // namespace

bool EnvironmentSpec::contains(Vec2 p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
}

std::vector<Segment> EnvironmentSpec::all_segments() const {
    std::vector<Segment> segs;
    segs.reserve(obstacles.size() + 4);
    const Vec2 c00{0.0, 0.0}, c10{width, 0.0}, c11{width, height}, c01{0.0, height};
    segs.push_back({c00, c10});
    segs.push_back({c10, c11});
    segs.push_back({c11, c01});
    segs.push_back({c01, c00});
    segs.insert(segs.end(), obstacles.begin(), obstacles.end());
    return segs;
}

void EnvironmentSpec::validate() const {
    if (!(width > 0.0)) throw EnvironmentError("width", "must be positive");
    if (!(height > 0.0)) throw EnvironmentError("height", "must be positive");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        if (!contains(obstacles[i].a) || !contains(obstacles[i].b)) {
            throw EnvironmentError("segment[" + std::to_string(i) + "]",
                                   "endpoint outside the arena");
        }
    }
    if (!(goal_radius > 0.0)) throw EnvironmentError("goal", "radius must be positive");
    if (!contains(goal_center)) throw EnvironmentError("goal", "centre outside the arena");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        if (point_segment_distance(goal_center, obstacles[i]) <= goal_radius) {
            throw EnvironmentError("goal", "disc intersects segment[" + std::to_string(i) + "]");
        }
    }
    if (!contains(start.position)) throw EnvironmentError("start", "outside the arena");
    if (distance(start.position, goal_center) < goal_radius) {
        throw EnvironmentError("start", "inside the goal disc");
    }
}

double ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& s) {
    const Vec2 e = s.b - s.a;
    const double denom = dir.cross(e);
    if (std::abs(denom) < kParallelEps) return kInf;
    const Vec2 ao = s.a - origin;
    const double t = ao.cross(e) / denom;
    const double u = ao.cross(dir) / denom;
    if (t < 0.0 || u < -kEndpointSlack || u > 1.0 + kEndpointSlack) return kInf;
    return t;
}

double point_segment_distance(Vec2 p, const Segment& s) {
    const Vec2 e = s.b - s.a;
    const double len2 = e.dot(e);
    double u = len2 > 0.0 ? (p - s.a).dot(e) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return distance(p, s.a + e * u);
}

LidarScan raycast(const EnvironmentSpec& env, const AgentState& state, int n_res,
                  double max_range) {
    if (!env.contains(state.position)) {
        throw InvalidStateError("raycast: agent position outside the arena");
    }
    if (n_res < 1) throw std::invalid_argument("raycast: n_res must be >= 1");
    if (max_range <= 0.0) max_range = env.diagonal();

    const auto segs = env.all_segments();
    LidarScan scan;
    scan.max_range = max_range;
    scan.ranges.resize(n_res);
    scan.bearings.resize(n_res);
    for (int j = 0; j < n_res; ++j) {
        const double bearing = kTwoPi * j / n_res;
        const Vec2 dir = Vec2::unit(bearing);
        double r = max_range;
        for (const auto& s : segs) {
            const double t = ray_segment_distance(state.position, dir, s);
            if (t > 0.0 && t < r) r = t;
        }
        // A zero hit means the agent sits on a segment; report the smallest
        // positive range rather than zero.
        scan.ranges[j] = std::max(r, 1e-9);
        scan.bearings[j] = bearing;
    }
    return scan;
}

AgentState step_agent(const EnvironmentSpec& env, const AgentState& state, double heading,
                      double step_len, double margin) {
    if (!(step_len > 0.0)) throw std::invalid_argument("step_agent: step_len must be positive");
    const Vec2 dir = Vec2::unit(heading);
    double travel = step_len;
    for (const auto& s : env.all_segments()) {
        travel = std::min(travel, capsule_entry(state.position, dir, s, margin));
    }
    travel = std::max(travel, 0.0);

    AgentState next;
    next.position = state.position + dir * travel;
    next.heading = wrap_2pi(heading);
    next.velocity = next.position - state.position;
    return next;
}

bool in_goal(const AgentState& state, const EnvironmentSpec& env) {
    return distance(state.position, env.goal_center) < env.goal_radius;
}

EnvironmentSpec parse_environment(std::string_view text, std::string name) {
    EnvironmentSpec env;
    env.name = std::move(name);
    bool have_width = false, have_height = false, have_goal = false, have_start = false;

    std::istringstream lines{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(lines, raw)) {
        ++line_no;
        std::istringstream in(strip_comment(raw));
        std::string key;
        if (!(in >> key)) continue;
        if (key == "name") {
            in >> env.name;
        } else if (key == "width") {
            env.width = read_numbers(in, 1, key, line_no)[0];
            have_width = true;
        } else if (key == "height") {
            env.height = read_numbers(in, 1, key, line_no)[0];
            have_height = true;
        } else if (key == "start") {
            const auto v = read_numbers(in, 3, key, line_no);
            env.start = {{v[0], v[1]}, wrap_2pi(deg2rad(v[2]))};
            have_start = true;
        } else if (key == "goal") {
            const auto v = read_numbers(in, 3, key, line_no);
            env.goal_center = {v[0], v[1]};
            env.goal_radius = v[2];
            have_goal = true;
        } else if (key == "segment") {
            const auto v = read_numbers(in, 4, key, line_no);
            env.obstacles.push_back({{v[0], v[1]}, {v[2], v[3]}});
        } else if (key == "rect") {
            const auto v = read_numbers(in, 4, key, line_no);
            const Vec2 p0{v[0], v[1]}, p1{v[0] + v[2], v[1]}, p2{v[0] + v[2], v[1] + v[3]},
                p3{v[0], v[1] + v[3]};
            env.obstacles.push_back({p0, p1});
            env.obstacles.push_back({p1, p2});
            env.obstacles.push_back({p2, p3});
            env.obstacles.push_back({p3, p0});
        } else {
            throw EnvironmentError(key, "line " + std::to_string(line_no) + ": unknown key");
        }
    }
    if (!have_width) throw EnvironmentError("width", "missing");
    if (!have_height) throw EnvironmentError("height", "missing");
    if (!have_goal) throw EnvironmentError("goal", "missing");
    if (!have_start) throw EnvironmentError("start", "missing");
    env.validate();
    return env;
}

EnvironmentSpec load_environment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw EnvironmentError("file", "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_environment(buf.str(), path.stem().string());
}

}  // namespace placenav
