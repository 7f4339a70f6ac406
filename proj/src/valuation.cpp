#include "placenav/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace placenav {

RewardCell RewardCell::zeros(int n_p, double cap) {
    RewardCell cell;
    cell.weights = Eigen::VectorXd::Zero(n_p);
    cell.cap = cap;
    return cell;
}

void ReplayBuffer::record(ActivitySnapshot snapshot) {
    if (capacity_ == 0) return;
    if (snapshots_.size() == capacity_) snapshots_.pop_front();
    snapshots_.push_back(std::move(snapshot));
}

double reward_ratio(const RewardCell& cell, const Eigen::VectorXd& place_rates) {
    if (cell.weights.size() != place_rates.size()) {
        throw std::invalid_argument("reward_ratio: weight and rate lengths differ");
    }
    const double l1 = place_rates.cwiseAbs().sum();
    return cell.weights.dot(place_rates) / std::max(l1, cell.epsilon);
}

double reward_activation(const RewardCell& cell, const Eigen::VectorXd& place_rates) {
    return std::min(std::max(reward_ratio(cell, place_rates), 0.0), cell.cap);
}

ReplayStatus reverse_replay(RewardCell& cell, const ReplayBuffer& buffer, double tau_r) {
    if (buffer.empty()) return ReplayStatus::empty_buffer;
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(cell.weights.size());
    int t_r = 0;
    const auto& snaps = buffer.snapshots();
    for (auto it = snaps.rbegin(); it != snaps.rend(); ++it) {
        const double peak = it->rates.cwiseAbs().maxCoeff();
        if (peak == 0.0) continue;
        delta += (it->rates / peak) * std::exp(-t_r / tau_r);
        ++t_r;
    }
    const double scale = delta.cwiseAbs().maxCoeff();
    if (scale == 0.0) return ReplayStatus::zero_update;
    cell.weights += delta / scale;
    return ReplayStatus::applied;
}

void td_update(RewardCell& cell, const Eigen::VectorXd& place_rates, const TdConfig& config) {
    if (cell.weights.size() != place_rates.size()) {
        throw std::invalid_argument("td_update: weight and rate lengths differ");
    }
    const double delta = config.reward - cell.weights.dot(place_rates);
    cell.weights = (cell.weights + config.eta * delta * place_rates).cwiseMax(0.0);
}

}  // namespace placenav
