#pragma once

#include <Eigen/Core>
#include <deque>
#include <optional>
#include <vector>

#include "placenav/place_memory.hpp"
#include "placenav/random.hpp"
#include "placenav/valuation.hpp"
#include "placenav/world.hpp"

namespace placenav {

struct FusionConfig {
    double validity_threshold = 1e-3;
    double d_safe = 0.3;
    double epsilon = 1e-4;
    int n_hd = 8;
    /// Adds the |Q(theta_last) - Q(theta_0)| term to the variation sum.
    bool wraparound_variation = false;
};

struct ExploreConfig {
    double sigma_turn = 0.5235987755982988;  // 30 degrees
    int explore_duration = 50;
    int loop_window = 100;
    double loop_displacement = 0.5;
    int resample_tries = 16;
};

struct FusedProfile {
    Eigen::MatrixXd q_raw;   // scales x headings
    Eigen::MatrixXd q_norm;  // after normalisation and masking
    std::vector<double> variation;
    std::vector<double> alpha;  // zero for scales outside the valid set
    std::vector<int> valid;
    std::vector<bool> masked;  // per heading
    bool blocked = false;
    Eigen::VectorXd fused;
    std::optional<double> theta;

    /// Index of the largest alpha, or -1 when no scale is valid.
    int dominant_scale() const;
};

enum class Mode { exploring, exploiting };

struct ModeState {
    Mode mode = Mode::exploiting;
    int explore_steps_remaining = 0;
    double turn_accumulator = 0.0;
    std::deque<Vec2> displacement_window;
    std::deque<double> turn_window;
    std::optional<double> last_heading;

    void start_exploring(int steps);
    /// Counts down one exploration step and switches back to exploitation
    /// when the budget is spent.
    void tick_exploration();
    void reset_loop_tracking();
};

/// Read-only view of one scale used during a decision.
struct ScaleView {
    const PlaceLayer* place;
    const AdjacencyTensor* adjacency;
    const RewardCell* reward;
};

/// One-step prediction of place-cell activity for basis heading `heading`.
Eigen::VectorXd preplay(const AdjacencyTensor& adjacency, const Eigen::VectorXd& place_rates,
                        int heading);

/// Reward estimate of a predicted pattern (uncapped ratio).
double scale_q(const RewardCell& cell, const Eigen::VectorXd& predicted);

Eigen::VectorXd normalize_profile(const Eigen::VectorXd& q, double epsilon);

/// Sum of |Q(d+1) - Q(d)| over consecutive headings.
double variation(const Eigen::VectorXd& q_norm, bool wraparound = false);

/// alpha_k = V_k / (sum V + eps) over the given variations.
std::vector<double> mixing_weights(const std::vector<double>& variations, double epsilon);

/// Weighted sum over the listed scales; `alpha` is indexed like `valid`.
Eigen::VectorXd fuse(const Eigen::MatrixXd& q_norm, const std::vector<double>& alpha,
                     const std::vector<int>& valid);

std::vector<int> validity_set(const std::vector<double>& maxima, double threshold);

/// Minimum range over beams within +-half_width of theta.
double cone_clearance(const LidarScan& scan, double theta, double half_width);

/// Zeroes every scale's entry for headings whose cone clearance is below
/// d_safe; returns the per-heading mask.
std::vector<bool> obstacle_mask(Eigen::MatrixXd& q_norm, const LidarScan& scan, double d_safe);

/// Circular mean of the profile over basis headings, in [0, 2pi); empty when
/// the resultant vanishes.
std::optional<double> action_angle(const Eigen::VectorXd& q);

enum class ActionKind { move, explore };

struct Decision {
    ActionKind kind = ActionKind::explore;
    double heading = 0.0;
    FusedProfile profile;
};

/// Preplay, per-scale evaluation and fusion for one tick. Switches the mode to
/// exploring when no scale is valid, every heading is masked, or the circular
/// mean is degenerate.
Decision decide(const std::vector<ScaleView>& scales, const LidarScan& scan, ModeState& mode,
                const FusionConfig& fusion, const ExploreConfig& explore);

/// Random-walk heading: previous heading plus uniform turn noise, re-drawn
/// when the chosen cone is closer than d_safe to a boundary.
double explore_step(double previous_heading, Rng& rng, const LidarScan& scan, double d_safe,
                    const ExploreConfig& config, int n_hd = 8);

enum class LoopStatus { ok, triggered };

/// Tracks turning against displacement over a sliding window; on trigger the
/// mode switches to exploring and the window is cleared.
LoopStatus loop_guard(ModeState& mode, const Pose& pose, const ExploreConfig& config);

}  // namespace placenav
