#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "placenav/config.hpp"
#include "placenav/model.hpp"
#include "placenav/world.hpp"

namespace placenav {

/// Which scales take part in decisions. Single-scale strategies list one
/// index, multiscale lists them all.
struct StrategySpec {
    std::string name;
    std::vector<int> scales;

    /// "small", "medium", "large" map to scales 0, 1, 2; "multiscale" to all.
    static StrategySpec named(const std::string& name, int n_scales);
    /// The three single-scale strategies followed by multiscale.
    static std::vector<StrategySpec> standard(int n_scales);
};

struct TrialRecord {
    std::string strategy;
    std::string environment;
    int trial = 0;
    int episode = 0;
    int step_count = 0;
    bool reached_goal = false;
    double sim_time = 0.0;  // step_count * seconds_per_step
    std::uint64_t seed = 0;
    std::string snapshot_hash;
};

/// One row of the per-step decision log.
struct StepRecord {
    int step = 0;
    Vec2 position;
    double heading = 0.0;
    Mode mode = Mode::exploring;
    std::uint32_t valid_mask = 0;
    std::vector<double> alpha;
    int dominant_scale = -1;
    std::optional<double> theta;
    std::uint32_t masked_mask = 0;
};

struct GoalSeekOptions {
    int max_steps = 20000;
    /// Plastic layers plus replay and TD when the goal is reached.
    bool learning = false;
    bool keep_log = false;
};

struct GoalSeekResult {
    TrialRecord record;
    std::vector<StepRecord> trajectory;
    std::vector<ReplayStatus> replay;
};

/// Random walk of `steps` ticks with place-field and adjacency learning on
/// every scale; reward weights untouched.
void run_mapping_phase(Model& model, const EnvironmentSpec& env, int steps, std::uint64_t seed);

/// Closed loop from the environment's start pose until the goal or
/// max_steps: sense, learn (if enabled), decide, move.
GoalSeekResult run_goal_seeking(const EnvironmentSpec& env, Model& model,
                                const StrategySpec& strategy, const GoalSeekOptions& options,
                                std::uint64_t seed);

struct Experiment1Result {
    std::vector<TrialRecord> rows;
    std::vector<std::string> snapshot_hashes;  // one per environment
};

/// Per environment: one mapping phase, one learning goal-seek that triggers a
/// single replay, then frozen evaluation trials for every strategy.
Experiment1Result run_experiment1(const ModelConfig& config,
                                  const std::vector<EnvironmentSpec>& environments);
Experiment1Result run_experiment1(const ModelConfig& config);

struct EpisodeSummary {
    std::string strategy;
    int episode = 0;
    double mean_steps = 0.0;
    double sem_steps = 0.0;
    double delta_steps = 0.0;  // mean(episode) - mean(episode - 1); 0 for the first
};

struct Experiment2Result {
    std::vector<TrialRecord> rows;
    std::vector<EpisodeSummary> episodes;
    /// Per strategy: the ΔSteps series, length episodes - 1.
    std::vector<std::pair<std::string, std::vector<double>>> delta_steps;
};

/// Tabula-rasa policy learning: runs x episodes per strategy with every
/// weight plastic throughout.
Experiment2Result run_experiment2(const ModelConfig& config, const EnvironmentSpec& environment);
Experiment2Result run_experiment2(const ModelConfig& config);

/// Results CSV: TrialRecord fields plus the config hash, with a header row.
void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& rows,
                      const std::string& config_hash);
std::vector<TrialRecord> read_trials_csv(std::istream& in);
void write_episode_csv(std::ostream& out, const std::vector<EpisodeSummary>& rows);
void write_decision_log(std::ostream& out, const std::vector<StepRecord>& steps, int n_scales);

std::string config_hash(const ModelConfig& config);

}  // namespace placenav
