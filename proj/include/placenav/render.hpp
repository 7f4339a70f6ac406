#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "placenav/model.hpp"
#include "placenav/world.hpp"

namespace placenav {

/// Regular grid over the arena; samples sit at cell centres.
struct SampleGrid {
    int nx = 50;
    int ny = 50;
    double width = 0.0;
    double height = 0.0;

    static SampleGrid over(const EnvironmentSpec& env, int nx, int ny);
    int size() const { return nx * ny; }
    int index(int ix, int iy) const { return iy * nx + ix; }
    Vec2 point(int ix, int iy) const;
    Vec2 point(int idx) const { return point(idx % nx, idx / nx); }
};

/// Settled place rates for every grid sample: rows are samples, columns cells.
Eigen::MatrixXd sample_place_fields(const Model& model, const EnvironmentSpec& env, int scale,
                                    const SampleGrid& grid, int settle_iterations = 20);

/// Reward-cell activation for every grid sample.
Eigen::VectorXd sample_reward_map(const Model& model, const EnvironmentSpec& env, int scale,
                                  const SampleGrid& grid, int settle_iterations = 20);

struct FieldStatistics {
    double coverage = 0.0;      // fraction of samples where some cell exceeds the threshold
    double uniqueness = 0.0;    // fraction of active cells whose peak sample is not shared
    double mean_area = 0.0;     // mean above-threshold sample count per active cell
    int active_cells = 0;       // cells whose peak exceeds the threshold
};

FieldStatistics field_statistics(const Eigen::MatrixXd& fields, double threshold = 0.2);

/// 8-bit greyscale PGM of one grid-valued map, min..max scaled.
/// Writes `<path>.range` alongside with the min and max used.
void write_pgm(const std::filesystem::path& path, const SampleGrid& grid,
               const Eigen::VectorXd& values);

/// Tiles of the `count` strongest cells' fields into one PGM.
void write_field_mosaic(const std::filesystem::path& path, const SampleGrid& grid,
                        const Eigen::MatrixXd& fields, int count);

void write_grid_csv(std::ostream& out, const SampleGrid& grid, const Eigen::VectorXd& values);

}  // namespace placenav
