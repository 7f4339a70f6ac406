#include "placenav/boundary.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace placenav {
namespace {

constexpr double kCutoffSigmas = 8.0;

double normal_density(double x, double sigma) {
    return std::exp(-0.5 * (x * x) / (sigma * sigma)) / (std::sqrt(kTwoPi) * sigma);
}

struct AngularWeights {
    double dir;
    std::vector<std::pair<int, double>> beams;  // (beam index, angular density)
};

const AngularWeights& angular_weights_for(std::vector<AngularWeights>& cache, double dir,
                                          const LidarScan& scan, double sigma_theta) {
    for (const auto& w : cache) {
        if (w.dir == dir) return w;
    }
    AngularWeights w{dir, {}};
    const double cutoff = kCutoffSigmas * sigma_theta;
    for (std::size_t j = 0; j < scan.size(); ++j) {
        const double dtheta = wrap_pi(scan.bearings[j] - dir);
        if (std::abs(dtheta) > cutoff) continue;
        w.beams.emplace_back(static_cast<int>(j), normal_density(dtheta, sigma_theta));
    }
    cache.push_back(std::move(w));
    return cache.back();
}

template <typename RadialTerm>
Eigen::VectorXd accumulate(const BvcLayer& layer, const LidarScan& scan, RadialTerm radial) {
    if (scan.ranges.size() != scan.bearings.size()) {
        throw std::invalid_argument("bvc_rates: ranges and bearings differ in length");
    }
    const int n = layer.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    std::vector<AngularWeights> cache;
    const double r_cut = kCutoffSigmas * layer.sigma_r;
    for (int i = 0; i < n; ++i) {
        const auto& ang = angular_weights_for(cache, layer.preferred_dirs[i], scan, layer.sigma_theta);
        const double d = layer.preferred_dists[i];
        double sum = 0.0;
        for (const auto& [j, a] : ang.beams) {
            const double dr = scan.ranges[j] - d;
            if (std::abs(dr) > r_cut) continue;
            sum += radial(dr) * a;
        }
        out[i] = sum / layer.norm;
    }
    return out;
}

}  // namespace

BvcLayer build_bvc_grid(int n_dirs, int n_dists, double max_dist, double sigma_r,
                        double sigma_theta, double norm) {
    if (n_dirs < 1 || n_dists < 1) throw std::invalid_argument("build_bvc_grid: empty grid");
    if (!(sigma_r > 0.0) || !(sigma_theta > 0.0)) {
        throw std::invalid_argument("build_bvc_grid: tuning widths must be positive");
    }
    if (!(norm > 0.0)) throw std::invalid_argument("build_bvc_grid: norm must be positive");
    BvcLayer layer;
    layer.sigma_r = sigma_r;
    layer.sigma_theta = sigma_theta;
    layer.norm = norm;
    for (int a = 0; a < n_dirs; ++a) {
        const double dir = kTwoPi * a / n_dirs;
        for (int k = 1; k <= n_dists; ++k) {
            layer.preferred_dirs.push_back(dir);
            layer.preferred_dists.push_back(max_dist * k / n_dists);
        }
    }
    layer.rates = Eigen::VectorXd::Zero(layer.size());
    return layer;
}

Eigen::VectorXd bvc_rates(const BvcLayer& layer, const LidarScan& scan) {
    const double s = layer.sigma_r;
    return accumulate(layer, scan, [s](double dr) { return normal_density(dr, s); });
}

Eigen::VectorXd bvc_rates_dsigma_r(const BvcLayer& layer, const LidarScan& scan) {
    const double s = layer.sigma_r;
    return accumulate(layer, scan, [s](double dr) {
        return normal_density(dr, s) * ((dr * dr) / (s * s * s) - 1.0 / s);
    });
}

}  // namespace placenav
