#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "placenav/boundary.hpp"
#include "placenav/config.hpp"
#include "placenav/navigator.hpp"
#include "placenav/orientation.hpp"
#include "placenav/place_memory.hpp"
#include "placenav/valuation.hpp"
#include "placenav/world.hpp"

namespace placenav {

/// Everything one spatial scale owns: BVC layer, place layer, traces,
/// adjacency tensor, reward cell and the episode's replay buffer.
struct ScaleStack {
    ScaleConfig config;
    BvcLayer bvc;
    PlaceLayer place;
    TraceState traces;
    AdjacencyTensor adjacency;
    RewardCell reward;
    ReplayBuffer buffer;
};

struct Plasticity {
    bool place_fields = false;
    bool adjacency = false;
    bool record = true;

    static Plasticity all() { return {true, true, true}; }
    static Plasticity frozen() { return {false, false, true}; }
};

class Model {
public:
    Model() = default;
    /// Builds fresh stacks for `env`; BVC ranges and norms that are left at
    /// zero in the config are resolved against the arena and beam count.
    Model(const ModelConfig& config, const EnvironmentSpec& env, std::uint64_t seed);

    const ModelConfig& config() const { return config_; }
    const HeadDirectionLayer& head_direction() const { return hd_; }
    std::vector<ScaleStack>& scales() { return scales_; }
    const std::vector<ScaleStack>& scales() const { return scales_; }
    int n_scales() const { return static_cast<int>(scales_.size()); }

    /// Zeroes membranes, rates, traces and replay buffers; weights are kept.
    void reset_activity();

    /// One sensory tick: BVC rates, place-cell step, optional Oja learning,
    /// traces and adjacency learning, then a replay snapshot.
    void sense(const LidarScan& scan, Vec2 velocity, const Plasticity& plasticity,
               std::int64_t step);

    /// Reverse replay followed by a TD update at the goal, for every scale.
    /// Buffers are cleared afterwards.
    std::vector<ReplayStatus> reward_goal();

    /// Place rates after `iterations` membrane steps at a fixed scan, starting
    /// from rest. No weights change.
    Eigen::VectorXd settle_rates(int scale, const LidarScan& scan, int iterations) const;

    std::vector<ScaleView> views(const std::vector<int>& scale_indices) const;

    /// Text snapshot: config plus all weights as hex floats.
    std::string serialize() const;
    static Model deserialize(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static Model load(const std::filesystem::path& path);
    /// FNV-1a of serialize().
    std::string weights_hash() const;

private:
    ModelConfig config_;
    HeadDirectionLayer hd_;
    std::vector<ScaleStack> scales_;
};

}  // namespace placenav
