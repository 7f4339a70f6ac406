#pragma once

#include <cmath>
#include <string>

#include "placenav/random.hpp"
#include "placenav/world.hpp"

namespace testing {

inline placenav::EnvironmentSpec open_arena(double w, double h) {
    placenav::EnvironmentSpec env;
    env.name = "open";
    env.width = w;
    env.height = h;
    env.goal_center = {w * 0.75, h * 0.75};
    env.goal_radius = 0.5;
    env.start = {{w * 0.25, h * 0.25}, 0.0};
    return env;
}

inline bool rel_close(double a, double b, double rel = 1e-9, double abs_floor = 1e-12) {
    return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

inline constexpr int kPropertyCases = 1000;

}  // namespace testing
