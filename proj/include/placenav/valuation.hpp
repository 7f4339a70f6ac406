#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <deque>

#include "placenav/place_memory.hpp"

namespace placenav {

inline constexpr double kRewardEpsilon = 1e-4;

/// Single goal-tuned reward cell fed by every place cell of one scale.
struct RewardCell {
    Eigen::VectorXd weights;
    double epsilon = kRewardEpsilon;
    double cap = 1e6;  // B

    static RewardCell zeros(int n_p, double cap = 1e6);
};

/// Place-cell snapshots of the current episode, oldest first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 10000) : capacity_(capacity) {}

    void record(ActivitySnapshot snapshot);
    void clear() { snapshots_.clear(); }

    std::size_t size() const { return snapshots_.size(); }
    bool empty() const { return snapshots_.empty(); }
    std::size_t capacity() const { return capacity_; }
    const ActivitySnapshot& operator[](std::size_t i) const { return snapshots_[i]; }
    const std::deque<ActivitySnapshot>& snapshots() const { return snapshots_; }

private:
    std::size_t capacity_;
    std::deque<ActivitySnapshot> snapshots_;
};

struct TdConfig {
    double eta = 0.01;
    double reward = 1.0;  // R_next
};

enum class ReplayStatus { applied, empty_buffer, zero_update };

/// (w . v) / max(|v|_1, eps), without the [0, B] clamp.
double reward_ratio(const RewardCell& cell, const Eigen::VectorXd& place_rates);

/// reward_ratio clamped to [0, B].
double reward_activation(const RewardCell& cell, const Eigen::VectorXd& place_rates);

/// Reverse replay: walks the buffer from the newest snapshot back, accumulating
/// (v / |v|_inf) * exp(-t_r / tau_r), then adds the accumulator scaled to unit
/// max norm. All-zero snapshots are skipped without advancing t_r.
ReplayStatus reverse_replay(RewardCell& cell, const ReplayBuffer& buffer, double tau_r);

/// delta = R - w . v; w <- max(w + eta * delta * v, 0).
void td_update(RewardCell& cell, const Eigen::VectorXd& place_rates, const TdConfig& config);

inline void record_step(ReplayBuffer& buffer, ActivitySnapshot snapshot) {
    buffer.record(std::move(snapshot));
}

}  // namespace placenav
