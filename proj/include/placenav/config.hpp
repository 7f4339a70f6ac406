#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "placenav/navigator.hpp"
#include "placenav/place_memory.hpp"

namespace placenav {

/// One BVC -> PC -> reward stack.
struct ScaleConfig {
    std::string name;
    double sigma_r = 1.0;
    double sigma_theta = 0.2;
    int n_pc = 100;
    int bvc_dirs = 8;
    int bvc_dists = 12;
    double bvc_max_dist = 0.0;  // <= 0: half the arena diagonal
    double n_bvc_norm = 0.0;    // <= 0: number of beams
    PlaceDynamics dynamics;
    PlasticityConfig plasticity;
};

struct WorldConfig {
    int n_res = 720;
    double max_range = 0.0;  // <= 0: arena diagonal
    double step_len = 0.1;
    double collision_margin = 0.1;
    double seconds_per_step = 0.1;
};

struct ValuationConfig {
    double tau_r = 10.0;
    std::size_t buffer_capacity = 10000;
    double eta = 0.01;
    double reward = 1.0;
    double cap = 1e6;
    double epsilon = 1e-4;
};

struct Experiment1Config {
    std::vector<std::string> environments;
    int trials = 20;
    int max_steps = 20000;
    int learning_max_steps = 50000;
};

struct Experiment2Config {
    std::string environment;
    int episodes = 51;
    int runs = 5;
    int episode_step_cap = 20000;
    int analysis_start_episode = 6;
};

struct ModelConfig {
    WorldConfig world;
    int n_hd = 8;
    double hd_anchor = 0.0;
    std::vector<ScaleConfig> scales;
    ValuationConfig valuation;
    FusionConfig fusion;
    ExploreConfig explore;
    int mapping_steps = 30000;
    std::uint64_t seed = 1;
    Experiment1Config exp1;
    Experiment2Config exp2;
};

/// Full-scale defaults: 20 x 20 m arenas, 720 beams, 2000/500/250 cells.
ModelConfig full_preset();
/// Reduced sizes for quick runs: 10 x 10 m arenas, 200/80/40 cells.
ModelConfig desk_preset();

ModelConfig parse_config(const std::string& json_text);
ModelConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ModelConfig& config);

/// FNV-1a 64 over arbitrary bytes, formatted as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace placenav
