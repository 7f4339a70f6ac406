#include "placenav/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "placenav/valuation.hpp"

namespace placenav {

SampleGrid SampleGrid::over(const EnvironmentSpec& env, int nx, int ny) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("grid resolution must be at least 2");
    return SampleGrid{nx, ny, env.width, env.height};
}

Vec2 SampleGrid::point(int ix, int iy) const {
    return {(ix + 0.5) * width / nx, (iy + 0.5) * height / ny};
}

Eigen::MatrixXd sample_place_fields(const Model& model, const EnvironmentSpec& env, int scale,
                                    const SampleGrid& grid, int settle_iterations) {
    const auto& stack = model.scales().at(scale);
    Eigen::MatrixXd out(grid.size(), stack.place.n_p);
    const int n_res = model.config().world.n_res;
    const double max_range = model.config().world.max_range;
    for (int i = 0; i < grid.size(); ++i) {
        AgentState st;
        st.position = grid.point(i);
        const LidarScan scan = raycast(env, st, n_res, max_range);
        out.row(i) = model.settle_rates(scale, scan, settle_iterations).transpose();
    }
    return out;
}

Eigen::VectorXd sample_reward_map(const Model& model, const EnvironmentSpec& env, int scale,
                                  const SampleGrid& grid, int settle_iterations) {
    const Eigen::MatrixXd fields = sample_place_fields(model, env, scale, grid, settle_iterations);
    const auto& cell = model.scales().at(scale).reward;
    Eigen::VectorXd out(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        out(i) = reward_activation(cell, fields.row(i).transpose());
    }
    return out;
}

FieldStatistics field_statistics(const Eigen::MatrixXd& fields, double threshold) {
    FieldStatistics s;
    const Eigen::Index n_samples = fields.rows();
    const Eigen::Index n_cells = fields.cols();
    if (n_samples == 0 || n_cells == 0) return s;

    int covered = 0;
    for (Eigen::Index i = 0; i < n_samples; ++i) {
        if (fields.row(i).maxCoeff() > threshold) ++covered;
    }
    s.coverage = static_cast<double>(covered) / static_cast<double>(n_samples);

    std::vector<Eigen::Index> peaks;
    double area = 0.0;
    for (Eigen::Index j = 0; j < n_cells; ++j) {
        Eigen::Index arg = 0;
        const double peak = fields.col(j).maxCoeff(&arg);
        if (peak <= threshold) continue;
        peaks.push_back(arg);
        area += static_cast<double>((fields.col(j).array() > threshold).count());
    }
    s.active_cells = static_cast<int>(peaks.size());
    if (peaks.empty()) return s;
    s.mean_area = area / static_cast<double>(peaks.size());
    std::vector<Eigen::Index> sorted = peaks;
    std::sort(sorted.begin(), sorted.end());
    int unique = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const bool dup_prev = i > 0 && sorted[i - 1] == sorted[i];
        const bool dup_next = i + 1 < sorted.size() && sorted[i + 1] == sorted[i];
        if (!dup_prev && !dup_next) ++unique;
    }
    s.uniqueness = static_cast<double>(unique) / static_cast<double>(sorted.size());
    return s;
}

namespace {

void write_pgm_raw(const std::filesystem::path& path, int w, int h,
                   const std::vector<unsigned char>& pixels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "P5\n" << w << ' ' << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
}

unsigned char scale_byte(double v, double lo, double hi) {
    if (!(hi > lo)) return 0;
    const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    return static_cast<unsigned char>(std::lround(t * 255.0));
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const SampleGrid& grid,
               const Eigen::VectorXd& values) {
    if (values.size() != grid.size()) throw std::invalid_argument("map size does not match grid");
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    std::vector<unsigned char> px(static_cast<std::size_t>(grid.size()));
    // image row 0 is the top of the arena
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            px[static_cast<std::size_t>((grid.ny - 1 - iy) * grid.nx + ix)] =
                scale_byte(values(grid.index(ix, iy)), lo, hi);
        }
    }
    write_pgm_raw(path, grid.nx, grid.ny, px);
    std::ofstream range(path.string() + ".range");
    range.precision(17);
    range << "min " << lo << "\nmax " << hi << '\n';
}

void write_field_mosaic(const std::filesystem::path& path, const SampleGrid& grid,
                        const Eigen::MatrixXd& fields, int count) {
    const int n_cells = static_cast<int>(fields.cols());
    count = std::clamp(count, 1, std::max(1, n_cells));
    std::vector<int> order(static_cast<std::size_t>(n_cells));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return fields.col(a).maxCoeff() > fields.col(b).maxCoeff();
    });
    order.resize(static_cast<std::size_t>(std::min(count, n_cells)));
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(order.size()))));
    const int rows = (static_cast<int>(order.size()) + cols - 1) / std::max(cols, 1);
    const int w = cols * (grid.nx + 1);
    const int h = rows * (grid.ny + 1);
    std::vector<unsigned char> px(static_cast<std::size_t>(w) * h, 0);
    for (std::size_t t = 0; t < order.size(); ++t) {
        const auto col = fields.col(order[t]);
        const double hi = col.maxCoeff();
        const int ox = static_cast<int>(t) % cols * (grid.nx + 1);
        const int oy = static_cast<int>(t) / cols * (grid.ny + 1);
        for (int iy = 0; iy < grid.ny; ++iy) {
            for (int ix = 0; ix < grid.nx; ++ix) {
                px[static_cast<std::size_t>((oy + grid.ny - 1 - iy) * w + ox + ix)] =
                    scale_byte(col(grid.index(ix, iy)), 0.0, hi);
            }
        }
    }
    write_pgm_raw(path, w, h, px);
}

void write_grid_csv(std::ostream& out, const SampleGrid& grid, const Eigen::VectorXd& values) {
    out << "x,y,value\n";
    out.precision(17);
    for (int i = 0; i < grid.size(); ++i) {
        const Vec2 p = grid.point(i);
        out << p.x << ',' << p.y << ',' << values(i) << '\n';
    }
}

}  // namespace placenav
