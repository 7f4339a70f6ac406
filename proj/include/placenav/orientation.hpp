#pragma once

#include <vector>

#include "placenav/geometry.hpp"

namespace placenav {

inline constexpr int kDefaultHeadDirections = 8;

/// Head-direction population. Preferred directions double as the basis
/// headings used for adjacency slices and preplay.
struct HeadDirectionLayer {
    std::vector<double> preferred_dirs;
    double anchor = 0.0;
    std::vector<double> rates;

    static HeadDirectionLayer make(int n_hd = kDefaultHeadDirections, double anchor = 0.0);
    int size() const { return static_cast<int>(preferred_dirs.size()); }
};

/// Evenly spaced headings 2*pi*d/n_hd, d = 0..n_hd-1.
std::vector<double> basis_headings(int n_hd = kDefaultHeadDirections);

/// Rectified projection of the velocity onto each preferred direction.
std::vector<double> hd_rates(const HeadDirectionLayer& layer, Vec2 velocity);

/// Index of the basis heading closest to theta on the circle; ties go to the
/// lower index.
int nearest_basis_heading(double theta, int n_hd = kDefaultHeadDirections);

}  // namespace placenav
