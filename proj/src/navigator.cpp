#include "placenav/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "placenav/orientation.hpp"

namespace placenav {

int FusedProfile::dominant_scale() const {
    int best = -1;
    double best_alpha = 0.0;
    for (int k : valid) {
        if (best < 0 || alpha[k] > best_alpha) {
            best = k;
            best_alpha = alpha[k];
        }
    }
    return best;
}

void ModeState::start_exploring(int steps) {
    mode = Mode::exploring;
    explore_steps_remaining = std::max(steps, 0);
    if (explore_steps_remaining == 0) mode = Mode::exploiting;
}

void ModeState::tick_exploration() {
    if (mode != Mode::exploring) return;
    if (explore_steps_remaining > 0) --explore_steps_remaining;
    if (explore_steps_remaining == 0) {
        mode = Mode::exploiting;
        reset_loop_tracking();
    }
}

void ModeState::reset_loop_tracking() {
    turn_accumulator = 0.0;
    displacement_window.clear();
    turn_window.clear();
    last_heading.reset();
}

Eigen::VectorXd preplay(const AdjacencyTensor& adjacency, const Eigen::VectorXd& place_rates,
                        int heading) {
    if (heading < 0 || heading >= adjacency.headings()) {
        throw std::out_of_range("preplay: heading index out of range");
    }
    const int n = static_cast<int>(place_rates.size());
    Eigen::VectorXd drive = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        const double vj = place_rates[j];
        if (vj == 0.0) continue;
        for (const auto& [i, w] : adjacency.column(heading, j)) {
            if (i != j) drive[i] += w * vj;
        }
    }
    return (drive - place_rates).cwiseMax(0.0).array().tanh();
}

double scale_q(const RewardCell& cell, const Eigen::VectorXd& predicted) {
    return reward_ratio(cell, predicted);
}

Eigen::VectorXd normalize_profile(const Eigen::VectorXd& q, double epsilon) {
    if (q.size() == 0) return q;
    return q / (q.maxCoeff() + epsilon);
}

double variation(const Eigen::VectorXd& q_norm, bool wraparound) {
    const auto n = q_norm.size();
    if (n < 2) throw std::invalid_argument("variation: need at least two headings");
    double v = 0.0;
    for (Eigen::Index d = 0; d + 1 < n; ++d) v += std::abs(q_norm[d + 1] - q_norm[d]);
    if (wraparound) v += std::abs(q_norm[0] - q_norm[n - 1]);
    return v;
}

std::vector<double> mixing_weights(const std::vector<double>& variations, double epsilon) {
    if (variations.empty()) throw std::invalid_argument("mixing_weights: empty valid set");
    double total = 0.0;
    for (double v : variations) total += v;
    std::vector<double> alpha(variations.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] = variations[i] / (total + epsilon);
    return alpha;
}

Eigen::VectorXd fuse(const Eigen::MatrixXd& q_norm, const std::vector<double>& alpha,
                     const std::vector<int>& valid) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(q_norm.cols());
    for (std::size_t i = 0; i < valid.size(); ++i) q += alpha[i] * q_norm.row(valid[i]).transpose();
    return q;
}

std::vector<int> validity_set(const std::vector<double>& maxima, double threshold) {
    std::vector<int> valid;
    for (std::size_t k = 0; k < maxima.size(); ++k) {
        if (maxima[k] > threshold) valid.push_back(static_cast<int>(k));
    }
    return valid;
}

double cone_clearance(const LidarScan& scan, double theta, double half_width) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < scan.size(); ++j) {
        if (std::abs(wrap_pi(scan.bearings[j] - theta)) <= half_width) {
            best = std::min(best, scan.ranges[j]);
        }
    }
    return best;
}

std::vector<bool> obstacle_mask(Eigen::MatrixXd& q_norm, const LidarScan& scan, double d_safe) {
    const int n_hd = static_cast<int>(q_norm.cols());
    const auto dirs = basis_headings(n_hd);
    const double half = kPi / n_hd;
    std::vector<bool> masked(n_hd, false);
    for (int d = 0; d < n_hd; ++d) {
        if (cone_clearance(scan, dirs[d], half) < d_safe) {
            masked[d] = true;
            q_norm.col(d).setZero();
        }
    }
    return masked;
}

std::optional<double> action_angle(const Eigen::VectorXd& q) {
    constexpr double kDegenerate = 1e-12;
    const auto dirs = basis_headings(static_cast<int>(q.size()));
    double s = 0.0, c = 0.0;
    for (Eigen::Index d = 0; d < q.size(); ++d) {
        s += q[d] * std::sin(dirs[d]);
        c += q[d] * std::cos(dirs[d]);
    }
    if (std::abs(s) < kDegenerate && std::abs(c) < kDegenerate) return std::nullopt;
    return wrap_2pi(std::atan2(s, c));
}

Decision decide(const std::vector<ScaleView>& scales, const LidarScan& scan, ModeState& mode,
                const FusionConfig& fusion, const ExploreConfig& explore) {
    const int n_scales = static_cast<int>(scales.size());
    const int n_hd = fusion.n_hd;
    Decision out;
    FusedProfile& p = out.profile;
    p.q_raw = Eigen::MatrixXd::Zero(n_scales, n_hd);
    p.q_norm = Eigen::MatrixXd::Zero(n_scales, n_hd);
    p.variation.assign(n_scales, 0.0);
    p.alpha.assign(n_scales, 0.0);

    std::vector<double> maxima(n_scales, 0.0);
    for (int k = 0; k < n_scales; ++k) {
        const auto& s = scales[k];
        for (int d = 0; d < n_hd; ++d) {
            p.q_raw(k, d) = scale_q(*s.reward, preplay(*s.adjacency, s.place->rates, d));
        }
        maxima[k] = p.q_raw.row(k).maxCoeff();
        p.q_norm.row(k) = normalize_profile(p.q_raw.row(k).transpose(), fusion.epsilon).transpose();
    }
    p.valid = validity_set(maxima, fusion.validity_threshold);

    if (!p.valid.empty()) {
        std::vector<double> v;
        for (int k : p.valid) {
            p.variation[k] = variation(p.q_norm.row(k).transpose(), fusion.wraparound_variation);
            v.push_back(p.variation[k]);
        }
        const auto alpha = mixing_weights(v, fusion.epsilon);
        for (std::size_t i = 0; i < p.valid.size(); ++i) p.alpha[p.valid[i]] = alpha[i];
    }

    p.masked = obstacle_mask(p.q_norm, scan, fusion.d_safe);
    p.blocked = std::all_of(p.masked.begin(), p.masked.end(), [](bool m) { return m; });

    std::vector<double> valid_alpha;
    for (int k : p.valid) valid_alpha.push_back(p.alpha[k]);
    p.fused = fuse(p.q_norm, valid_alpha, p.valid);
    p.theta = action_angle(p.fused);

    if (p.valid.empty() || p.blocked || !p.theta) {
        mode.start_exploring(explore.explore_duration);
        out.kind = ActionKind::explore;
    } else {
        out.kind = ActionKind::move;
        out.heading = *p.theta;
    }
    return out;
}

double explore_step(double previous_heading, Rng& rng, const LidarScan& scan, double d_safe,
                    const ExploreConfig& config, int n_hd) {
    const double half = kPi / n_hd;
    double theta = wrap_2pi(previous_heading + rng.uniform(-config.sigma_turn, config.sigma_turn));
    if (cone_clearance(scan, theta, half) >= d_safe) return theta;
    for (int t = 0; t < config.resample_tries; ++t) {
        theta = rng.uniform(0.0, kTwoPi);
        if (cone_clearance(scan, theta, half) >= d_safe) return theta;
    }
    const auto dirs = basis_headings(n_hd);
    int best = 0;
    double best_clear = -1.0;
    for (int d = 0; d < n_hd; ++d) {
        const double c = cone_clearance(scan, dirs[d], half);
        if (c > best_clear) {
            best_clear = c;
            best = d;
        }
    }
    return dirs[best];
}

LoopStatus loop_guard(ModeState& mode, const Pose& pose, const ExploreConfig& config) {
    if (mode.last_heading) {
        const double turn = std::abs(wrap_pi(pose.heading - *mode.last_heading));
        mode.turn_window.push_back(turn);
    } else {
        mode.turn_window.push_back(0.0);
    }
    mode.last_heading = pose.heading;
    mode.displacement_window.push_back(pose.position);
    while (static_cast<int>(mode.displacement_window.size()) > config.loop_window) {
        mode.displacement_window.pop_front();
        mode.turn_window.pop_front();
    }
    mode.turn_accumulator = 0.0;
    for (double t : mode.turn_window) mode.turn_accumulator += t;
    const double net = distance(mode.displacement_window.back(), mode.displacement_window.front());
    if (mode.turn_accumulator > kTwoPi && net < config.loop_displacement) {
        mode.reset_loop_tracking();
        mode.start_exploring(config.explore_duration);
        return LoopStatus::triggered;
    }
    return LoopStatus::ok;
}

}  // namespace placenav
