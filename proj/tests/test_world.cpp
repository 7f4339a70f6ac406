#include <doctest.h>

#include <cmath>
#include <limits>

#include "placenav/world.hpp"
#include "support.hpp"

using namespace placenav;
using testing::open_arena;

namespace {

// Independent ray/segment intersection: solve origin + t*dir = a + u*(b - a)
// by Cramer's rule on the 2x2 system.
double cramer_hit(Vec2 o, Vec2 d, Vec2 a, Vec2 b) {
    const double m00 = d.x, m01 = a.x - b.x, m10 = d.y, m11 = a.y - b.y;
    const double det = m00 * m11 - m01 * m10;
    if (det == 0.0) return std::numeric_limits<double>::infinity();
    const double rx = a.x - o.x, ry = a.y - o.y;
    const double t = (rx * m11 - m01 * ry) / det;
    const double u = (m00 * ry - m10 * rx) / det;
    if (t < 0.0 || u < 0.0 || u > 1.0) return std::numeric_limits<double>::infinity();
    return t;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("raycast from the centre of an empty 20 m arena") {
    const auto env = open_arena(20, 20);
    AgentState s;
    s.position = {10, 10};
    const auto scan = raycast(env, s, 8);
    CHECK(scan.bearings[0] == 0.0);
    CHECK(scan.ranges[0] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(scan.bearings[1] == doctest::Approx(kPi / 4));
    CHECK(scan.ranges[1] == doctest::Approx(10.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("raycast hits an obstacle crossing the beam at 3 m") {
    auto env = open_arena(20, 20);
    env.obstacles.push_back({{13, 8}, {13, 12}});
    AgentState s;
    s.position = {10, 10};
    const auto scan = raycast(env, s, 720);
    CHECK(testing::rel_close(scan.ranges[0], 3.0));

    // oblique segment and beam, checked against the Cramer solution
    env.obstacles = {{{11, 14}, {15, 9}}};
    const auto scan2 = raycast(env, s, 360);
    for (int j = 0; j < 360; ++j) {
        const Vec2 d = Vec2::unit(scan2.bearings[j]);
        double expect = scan2.max_range;
        for (const auto& seg : env.all_segments()) {
            expect = std::min(expect, cramer_hit(s.position, d, seg.a, seg.b));
        }
        CHECK(testing::rel_close(scan2.ranges[j], expect));
    }
}

TEST_CASE("raycast rejects positions outside the arena") {
    const auto env = open_arena(10, 10);
    AgentState s;
    s.position = {-0.5, 3};
    CHECK_THROWS_AS(raycast(env, s, 16), InvalidStateError);
}

TEST_CASE("raycast max_range defaults to the diagonal and clamps") {
    const auto env = open_arena(10, 10);
    AgentState s;
    s.position = {5, 5};
    const auto scan = raycast(env, s, 4);
    CHECK(scan.max_range == doctest::Approx(env.diagonal()));
    const auto clamped = raycast(env, s, 4, 2.0);
    for (double r : clamped.ranges) CHECK(r == 2.0);
}

TEST_CASE("step_agent basic moves") {
    const auto env = open_arena(10, 10);
    AgentState s;
    s.position = {0, 0};
    auto n = step_agent(env, s, 0.0, 0.1);
    CHECK(n.position.x == doctest::Approx(0.1));
    CHECK(n.position.y == doctest::Approx(0.0));
    n = step_agent(env, s, kPi / 2, 0.1);
    CHECK(n.position.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(n.position.y == doctest::Approx(0.1));
    CHECK(n.velocity.y == doctest::Approx(0.1));
}

TEST_CASE("step_agent clamps at the collision margin") {
    auto env = open_arena(10, 10);
    env.obstacles.push_back({{0.05, 0.0}, {0.05, 1.0}});
    env.goal_center = {8, 8};
    AgentState s;
    s.position = {0.0, 0.5};
    const auto n = step_agent(env, s, 0.0, 0.1, 0.02);
    CHECK(testing::rel_close(n.position.x, 0.03));
    CHECK(n.heading == 0.0);
    CHECK(testing::rel_close(n.velocity.x, 0.03));
}

TEST_CASE("step_agent rejects non-positive step length") {
    const auto env = open_arena(10, 10);
    AgentState s;
    s.position = {5, 5};
    CHECK_THROWS(step_agent(env, s, 0.0, 0.0));
}

TEST_CASE("goal detection is a strict inequality") {
    auto env = open_arena(10, 10);
    env.goal_center = {2, 2};
    env.goal_radius = 0.5;
    AgentState s;
    s.position = {2, 2};
    CHECK(in_goal(s, env));
    s.position = {2.5, 2};
    CHECK_FALSE(in_goal(s, env));
    s.position = {2.4, 2};
    CHECK(in_goal(s, env));
}

TEST_CASE("environment files") {
    const auto minimal = parse_environment("width 10\nheight 8\ngoal 7 6 0.5\nstart 1 1 90\n");
    CHECK(minimal.obstacles.empty());
    CHECK(minimal.width == 10);
    CHECK(minimal.start.heading == doctest::Approx(kPi / 2));

    const auto rect = parse_environment(
        "width 10\nheight 10\ngoal 8 8 0.5\nstart 1 1 0\nrect 2, 2, 3, 1  # box\n");
    CHECK(rect.obstacles.size() == 4);

    try {
        parse_environment("width 10\nheight 10\ngoal 5 5 0.5\nstart 1 1 0\nrect 4.8 4.8 0.4 0.4\n");
        FAIL("goal inside an obstacle must be rejected");
    } catch (const EnvironmentError& e) {
        CHECK(e.field() == "goal");
    }
    CHECK_THROWS_AS(parse_environment("width 10\nheight 10\ngoal 5 5 0.5\nstart 5 5.2 0\n"),
                    EnvironmentError);
    CHECK_THROWS_AS(parse_environment("width 10\nheight 10\ngoal 5 5 0.5\nstart 1 1 0\nsegment 1 1 12 1\n"),
                    EnvironmentError);
    CHECK_THROWS_AS(parse_environment("width -1\nheight 10\ngoal 5 5 0.5\nstart 1 1 0\n"),
                    EnvironmentError);
    CHECK_THROWS_AS(parse_environment("width 10\nheight 10\ngoal 5 5 0.5\nstart 1 1 0\nwall 1\n"),
                    EnvironmentError);
    CHECK_THROWS_AS(parse_environment("width 10\nheight 10\ngoal 5 5\nstart 1 1 0\n"),
                    EnvironmentError);
}

TEST_CASE("shipped environments load") {
    const std::string dir = PLACENAV_DATA_DIR "/envs/";
    int open = 0;
    for (const char* name : {"env1", "env2", "env3", "env4"}) {
        const auto env = load_environment(dir + name + ".env");
        CHECK(env.name == name);
        CHECK(env.width == 20);
        CHECK(env.height == 20);
        CHECK(env.goal_radius == 0.5);
        if (env.obstacles.empty()) ++open;
    }
    CHECK(load_environment(dir + "env1.env").obstacles.empty());
    CHECK(open == 1);
    CHECK(load_environment(dir + "desk_open.env").obstacles.empty());
    CHECK(load_environment(dir + "desk_obstacle.env").obstacles.size() == 4);
}

}  // TEST_SUITE

TEST_SUITE("invariant") {

TEST_CASE("raycast quarter-turn symmetry at the centre of a square arena") {
    const auto env = open_arena(20, 20);
    placenav::Rng rng(101);
    for (int c = 0; c < testing::kPropertyCases; ++c) {
        const int n = 4 * (1 + static_cast<int>(rng.uniform() * 60));
        AgentState s;
        s.position = {10, 10};
        const auto scan = raycast(env, s, n);
        const int j = static_cast<int>(rng.uniform() * n);
        CHECK(testing::rel_close(scan.ranges[j], scan.ranges[(j + n / 4) % n], 1e-12));
    }
}

TEST_CASE("raycast ignores the agent heading") {
    auto env = open_arena(10, 10);
    env.obstacles.push_back({{3, 6}, {7, 6.5}});
    env.goal_center = {8.5, 8.5};
    placenav::Rng rng(102);
    for (int c = 0; c < testing::kPropertyCases; ++c) {
        AgentState a;
        a.position = {rng.uniform(0.2, 9.8), rng.uniform(0.2, 9.8)};
        a.heading = rng.uniform(0, kTwoPi);
        AgentState b = a;
        b.heading = rng.uniform(0, kTwoPi);
        b.velocity = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto sa = raycast(env, a, 64);
        const auto sb = raycast(env, b, 64);
        CHECK(sa.ranges == sb.ranges);
        CHECK(sa.bearings == sb.bearings);
        for (double r : sa.ranges) {
            CHECK(r > 0.0);
            CHECK(r <= sa.max_range);
        }
    }
}

TEST_CASE("step_agent keeps the agent inside the arena and off obstacles") {
    auto env = open_arena(10, 10);
    env.obstacles.push_back({{2, 5}, {8, 5}});
    env.obstacles.push_back({{5, 1}, {5, 4}});
    env.goal_center = {8.5, 8.5};
    const double margin = 0.1;
    placenav::Rng rng(103);
    AgentState s;
    s.position = {1, 1};
    for (int c = 0; c < 20 * testing::kPropertyCases; ++c) {
        const double before = [&] {
            double m = std::numeric_limits<double>::infinity();
            for (const auto& seg : env.all_segments()) m = std::min(m, point_segment_distance(s.position, seg));
            return m;
        }();
        s = step_agent(env, s, rng.uniform(0, kTwoPi), rng.uniform(0.01, 0.5), margin);
        REQUIRE(env.contains(s.position));
        double clearance = std::numeric_limits<double>::infinity();
        for (const auto& seg : env.all_segments()) {
            clearance = std::min(clearance, point_segment_distance(s.position, seg));
        }
        // a start inside the margin may only move to larger clearance
        CHECK(clearance >= std::min(margin, before) - 1e-9);
    }
}

TEST_CASE("path length equals the sum of per-step travel") {
    auto env = open_arena(10, 10);
    env.obstacles.push_back({{3, 3}, {7, 7}});
    env.goal_center = {8.5, 1.5};
    placenav::Rng rng(104);
    for (int c = 0; c < testing::kPropertyCases; ++c) {
        AgentState s;
        s.position = {1, 8};
        const double step = rng.uniform(0.05, 0.3);
        int unclamped = 0;
        double clamped_sum = 0.0, path = 0.0;
        for (int t = 0; t < 50; ++t) {
            const auto n = step_agent(env, s, rng.uniform(0, kTwoPi), step);
            const double moved = distance(n.position, s.position);
            path += moved;
            if (std::abs(moved - step) < 1e-12) {
                ++unclamped;
            } else {
                clamped_sum += moved;
            }
            s = n;
        }
        CHECK(path == doctest::Approx(step * unclamped + clamped_sum).epsilon(1e-12));
    }
}

}  // TEST_SUITE
