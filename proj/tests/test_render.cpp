#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <queue>
#include <sstream>

#include "placenav/config.hpp"
#include "placenav/experiment.hpp"
#include "placenav/render.hpp"
#include "support.hpp"

using namespace placenav;

namespace {

struct Pgm {
    int w = 0, h = 0, maxval = 0;
    std::vector<unsigned char> px;
};

Pgm read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    Pgm img;
    in >> magic >> img.w >> img.h >> img.maxval;
    in.get();
    img.px.resize(static_cast<std::size_t>(img.w) * img.h);
    in.read(reinterpret_cast<char*>(img.px.data()), static_cast<std::streamsize>(img.px.size()));
    REQUIRE(magic == "P5");
    REQUIRE(in.gcount() == static_cast<std::streamsize>(img.px.size()));
    return img;
}

std::filesystem::path scratch_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "placenav_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("sample grid geometry") {
    const auto env = testing::open_arena(10, 4);
    const auto g = SampleGrid::over(env, 5, 2);
    CHECK(g.size() == 10);
    CHECK(g.point(0, 0).x == 1.0);
    CHECK(g.point(0, 0).y == 1.0);
    CHECK(g.point(4, 1).x == 9.0);
    CHECK(g.point(4, 1).y == 3.0);
    CHECK(g.point(g.index(3, 1)).x == g.point(3, 1).x);
    CHECK_THROWS(SampleGrid::over(env, 1, 5));
}

TEST_CASE("constant field renders a uniform image") {
    const auto env = testing::open_arena(10, 10);
    const auto g = SampleGrid::over(env, 50, 50);
    const auto path = scratch_file("constant.pgm");
    write_pgm(path, g, Eigen::VectorXd::Constant(g.size(), 0.7));
    const auto img = read_pgm(path);
    CHECK(img.w == 50);
    CHECK(img.h == 50);
    CHECK(std::all_of(img.px.begin(), img.px.end(), [&](unsigned char p) { return p == img.px[0]; }));
    std::ifstream range(path.string() + ".range");
    std::string k1, k2;
    double lo = 0, hi = 0;
    range >> k1 >> lo >> k2 >> hi;
    CHECK(k1 == "min");
    CHECK(k2 == "max");
    CHECK(lo == 0.7);
    CHECK(hi == 0.7);
}

TEST_CASE("image intensity is linear in value with north at the top") {
    const auto env = testing::open_arena(4, 4);
    const auto g = SampleGrid::over(env, 4, 3);
    Eigen::VectorXd v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = 2.0 + i;
    const auto path = scratch_file("ramp.pgm");
    write_pgm(path, g, v);
    const auto img = read_pgm(path);
    CHECK(img.w == 4);
    CHECK(img.h == 3);
    for (int iy = 0; iy < 3; ++iy) {
        for (int ix = 0; ix < 4; ++ix) {
            const double t = (v[g.index(ix, iy)] - 2.0) / 11.0;
            CHECK(img.px[(2 - iy) * 4 + ix] == std::lround(255.0 * t));
        }
    }
    CHECK_THROWS(write_pgm(path, g, Eigen::VectorXd::Zero(5)));
}

TEST_CASE("grid csv lists every sample") {
    const auto env = testing::open_arena(2, 2);
    const auto g = SampleGrid::over(env, 2, 2);
    std::ostringstream out;
    write_grid_csv(out, g, Eigen::Vector4d(0.0, 0.25, 0.5, 1.0));
    CHECK(out.str() == "x,y,value\n0.5,0.5,0\n1.5,0.5,0.25\n0.5,1.5,0.5\n1.5,1.5,1\n");
}

TEST_CASE("field statistics on hand-built fields") {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(6, 4);
    f.col(0) << 0.9, 0.5, 0.1, 0, 0, 0;
    f.col(1) << 0, 0, 0, 0.3, 0.8, 0;
    f.col(2) << 0, 0, 0, 0.1, 0.6, 0.1;
    f.col(3) << 0.1, 0.1, 0.1, 0.1, 0.1, 0.1;
    const auto s = field_statistics(f, 0.2);
    CHECK(s.active_cells == 3);
    CHECK(s.coverage == 4.0 / 6.0);
    CHECK(s.uniqueness == 1.0 / 3.0);
    CHECK(s.mean_area == 5.0 / 3.0);
}

}  // TEST_SUITE

TEST_SUITE("integration") {

TEST_CASE("a single place cell renders as one bright blob") {
    const auto env = testing::open_arena(10, 10);
    ModelConfig cfg = desk_preset();
    cfg.scales.resize(1);
    Model model(cfg, env, 3);
    run_mapping_phase(model, env, 3000, 4);
    const auto g = SampleGrid::over(env, 50, 50);
    const auto fields = sample_place_fields(model, env, 0, g);
    Eigen::Index cell = 0;
    fields.colwise().maxCoeff().maxCoeff(&cell);
    const Eigen::VectorXd field = fields.col(cell);
    const auto path = scratch_file("blob.pgm");
    write_pgm(path, g, field);
    const auto img = read_pgm(path);

    std::ostringstream csv;
    write_grid_csv(csv, g, field);
    std::istringstream rows(csv.str());
    std::string line;
    std::getline(rows, line);
    double best = -1, bx = 0, by = 0;
    while (std::getline(rows, line)) {
        double x, y, v;
        char c1, c2;
        std::istringstream(line) >> x >> c1 >> y >> c2 >> v;
        if (v > best) {
            best = v;
            bx = x;
            by = y;
        }
    }
    const int ix = static_cast<int>(bx / 10.0 * 50);
    const int iy = static_cast<int>(by / 10.0 * 50);
    CHECK(img.px[(49 - iy) * 50 + ix] == 255);

    // bright pixels form one 4-connected component containing the peak
    std::vector<char> seen(img.px.size(), 0);
    std::queue<int> todo;
    todo.push((49 - iy) * 50 + ix);
    seen[todo.front()] = 1;
    int reached = 0;
    while (!todo.empty()) {
        const int p = todo.front();
        todo.pop();
        ++reached;
        const int px = p % 50, py = p / 50;
        const int nb[4][2] = {{px + 1, py}, {px - 1, py}, {px, py + 1}, {px, py - 1}};
        for (const auto& n : nb) {
            if (n[0] < 0 || n[0] >= 50 || n[1] < 0 || n[1] >= 50) continue;
            const int q = n[1] * 50 + n[0];
            if (!seen[q] && img.px[q] >= 128) {
                seen[q] = 1;
                todo.push(q);
            }
        }
    }
    const auto bright = std::count_if(img.px.begin(), img.px.end(), [](unsigned char p) { return p >= 128; });
    CHECK(reached == bright);
    CHECK(bright < 50 * 50 / 4);
}

}  // TEST_SUITE
