#include "placenav/orientation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace placenav {

std::vector<double> basis_headings(int n_hd) {
    if (n_hd < 1) throw std::invalid_argument("basis_headings: n_hd must be >= 1");
    std::vector<double> dirs(n_hd);
    for (int d = 0; d < n_hd; ++d) dirs[d] = kTwoPi * d / n_hd;
    return dirs;
}

HeadDirectionLayer HeadDirectionLayer::make(int n_hd, double anchor) {
    HeadDirectionLayer layer;
    layer.preferred_dirs = basis_headings(n_hd);
    layer.anchor = anchor;
    layer.rates.assign(n_hd, 0.0);
    return layer;
}

std::vector<double> hd_rates(const HeadDirectionLayer& layer, Vec2 velocity) {
    std::vector<double> rates(layer.preferred_dirs.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const double raw = velocity.dot(Vec2::unit(layer.preferred_dirs[i] + layer.anchor));
        rates[i] = std::max(raw, 0.0);
    }
    return rates;
}

int nearest_basis_heading(double theta, int n_hd) {
    constexpr double kTieTolerance = 1e-12;
    const auto dirs = basis_headings(n_hd);
    std::vector<double> dist(n_hd);
    for (int d = 0; d < n_hd; ++d) dist[d] = std::abs(wrap_pi(theta - dirs[d]));
    const double best = *std::min_element(dist.begin(), dist.end());
    for (int d = 0; d < n_hd; ++d) {
        if (dist[d] <= best + kTieTolerance) return d;
    }
    return 0;
}

}  // namespace placenav
