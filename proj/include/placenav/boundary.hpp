#pragma once

#include <Eigen/Core>
#include <vector>

#include "placenav/world.hpp"

namespace placenav {

/// Boundary-vector-cell population: each cell pairs a preferred boundary
/// distance with a preferred allocentric direction.
struct BvcLayer {
    std::vector<double> preferred_dists;  // metres
    std::vector<double> preferred_dirs;   // radians
    double sigma_r = 1.0;
    double sigma_theta = 0.2;
    double norm = 1.0;  // N_BVC
    Eigen::VectorXd rates;

    int size() const { return static_cast<int>(preferred_dists.size()); }
};

/// Product grid of n_dirs uniform directions and n_dists uniform distances
/// max_dist*k/n_dists, k = 1..n_dists. Cells are direction-major.
BvcLayer build_bvc_grid(int n_dirs, int n_dists, double max_dist, double sigma_r,
                        double sigma_theta, double norm);

/// Sum over beams of the product of a radial and an angular normal density,
/// divided by layer.norm. Pairs further than 8 sigma apart in either
/// coordinate are skipped (relative weight below 2e-14).
Eigen::VectorXd bvc_rates(const BvcLayer& layer, const LidarScan& scan);

/// Analytic derivative of bvc_rates with respect to sigma_r.
Eigen::VectorXd bvc_rates_dsigma_r(const BvcLayer& layer, const LidarScan& scan);

}  // namespace placenav
