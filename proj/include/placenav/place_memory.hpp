#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <vector>

namespace placenav {

/// Membrane and inhibition constants of one place layer. Time constants are
/// in simulation steps.
struct PlaceDynamics {
    double tau_p = 1.0;
    double psi = 3.0;
    double gamma_pb = 0.0;
    double gamma_pp = 0.0;
};

struct PlasticityConfig {
    double tau_w_pb = 50.0;
    double alpha_pb = 1.0;
    double p_pb = 0.25;
    double tau_m = 5.0;
    double tau_w_pp = 10.0;
    double dt = 1.0;
    /// New adjacency entries are only created for updates larger than this.
    double adjacency_floor = 1e-6;
};

struct PlaceLayer {
    int n_p = 0;
    int n_b = 0;
    PlaceDynamics dynamics;
    Eigen::VectorXd membrane;
    Eigen::VectorXd rates;
    Eigen::MatrixXd w_pb;  // n_p x n_b, BVC -> PC
};

/// Exponential activity traces of the place and head-direction populations.
struct TraceState {
    Eigen::VectorXd place;
    Eigen::VectorXd head;

    static TraceState zeros(int n_p, int n_hd);
};

/// Heading-gated PC -> PC weights W[k][post][pre], stored per heading and
/// presynaptic cell so preplay can walk the columns of the active cells.
class AdjacencyTensor {
public:
    AdjacencyTensor() = default;
    AdjacencyTensor(int n_hd, int n_p);

    int headings() const { return n_hd_; }
    int cells() const { return n_p_; }

    double at(int k, int post, int pre) const;
    /// Adds delta to an existing entry; creates the entry only when
    /// |delta| > floor.
    void add(int k, int post, int pre, double delta, double floor);
    /// Sets an entry unconditionally (used when loading snapshots).
    void set(int k, int post, int pre, double value);

    /// post -> weight for one heading and presynaptic cell.
    const std::map<int, double>& column(int k, int pre) const { return cols_[index(k, pre)]; }
    std::size_t nonzeros() const;

    struct Triplet {
        int k;
        int post;
        int pre;
        double value;
    };
    /// Entries ordered by (k, pre, post).
    std::vector<Triplet> triplets() const;

    bool operator==(const AdjacencyTensor&) const = default;

private:
    std::size_t index(int k, int pre) const { return static_cast<std::size_t>(k) * n_p_ + pre; }

    int n_hd_ = 0;
    int n_p_ = 0;
    std::vector<std::map<int, double>> cols_;
};

struct ActivitySnapshot {
    Eigen::VectorXd rates;
    std::int64_t step = 0;
};

/// Binary sparse BVC -> PC weights: each entry is 1 with probability p_pb.
PlaceLayer init_place_layer(int n_p, int n_b, const PlaceDynamics& dynamics,
                            const PlasticityConfig& config, std::uint64_t seed);

/// One forward-Euler step of the membrane equation followed by the
/// rectified-tanh rate. Recurrent inhibition uses the rates from before the
/// step.
void pc_step(PlaceLayer& layer, const Eigen::VectorXd& bvc, double dt);

/// Oja-style BVC -> PC learning; weights are clamped at zero.
void oja_update(PlaceLayer& layer, const Eigen::VectorXd& bvc, double dt,
                const PlasticityConfig& config);

void trace_step(TraceState& traces, const Eigen::VectorXd& place_rates,
                const Eigen::VectorXd& head_rates, double dt, double tau_m);

/// Temporally smoothed STDP on the adjacency tensor, gated per heading by the
/// head-direction trace. The (i, j) and (j, i) updates are exact negatives.
void adjacency_update(AdjacencyTensor& adjacency, const Eigen::VectorXd& place_rates,
                      const TraceState& traces, double dt, double tau_w_pp,
                      double floor = 1e-6);

ActivitySnapshot snapshot_activity(const PlaceLayer& layer, std::int64_t step);

}  // namespace placenav
