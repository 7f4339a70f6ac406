#include "placenav/place_memory.hpp"

#include <cmath>
#include <stdexcept>

#include "placenav/random.hpp"

namespace placenav {
namespace {

// Traces below this are treated as silent when enumerating adjacency pairs.
constexpr double kTraceSupport = 1e-9;
// tanh rounds to 1 for large arguments; rates stay strictly below it.
const double kMaxRate = std::nextafter(1.0, 0.0);

}  // namespace

TraceState TraceState::zeros(int n_p, int n_hd) {
    return {Eigen::VectorXd::Zero(n_p), Eigen::VectorXd::Zero(n_hd)};
}

AdjacencyTensor::AdjacencyTensor(int n_hd, int n_p)
    : n_hd_(n_hd), n_p_(n_p), cols_(static_cast<std::size_t>(n_hd) * n_p) {}

double AdjacencyTensor::at(int k, int post, int pre) const {
    const auto& col = cols_[index(k, pre)];
    const auto it = col.find(post);
    return it == col.end() ? 0.0 : it->second;
}

void AdjacencyTensor::add(int k, int post, int pre, double delta, double floor) {
    auto& col = cols_[index(k, pre)];
    const auto it = col.find(post);
    if (it != col.end()) {
        it->second += delta;
    } else if (std::abs(delta) > floor) {
        col.emplace(post, delta);
    }
}

void AdjacencyTensor::set(int k, int post, int pre, double value) {
    cols_[index(k, pre)][post] = value;
}

std::size_t AdjacencyTensor::nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : cols_) n += c.size();
    return n;
}

std::vector<AdjacencyTensor::Triplet> AdjacencyTensor::triplets() const {
    std::vector<Triplet> out;
    out.reserve(nonzeros());
    for (int k = 0; k < n_hd_; ++k) {
        for (int pre = 0; pre < n_p_; ++pre) {
            for (const auto& [post, w] : cols_[index(k, pre)]) out.push_back({k, post, pre, w});
        }
    }
    return out;
}

PlaceLayer init_place_layer(int n_p, int n_b, const PlaceDynamics& dynamics,
                            const PlasticityConfig& config, std::uint64_t seed) {
    if (n_p < 1 || n_b < 1) throw std::invalid_argument("init_place_layer: empty layer");
    if (!(config.p_pb > 0.0 && config.p_pb <= 1.0)) {
        throw std::invalid_argument("init_place_layer: p_pb must be in (0, 1]");
    }
    PlaceLayer layer;
    layer.n_p = n_p;
    layer.n_b = n_b;
    layer.dynamics = dynamics;
    layer.membrane = Eigen::VectorXd::Zero(n_p);
    layer.rates = Eigen::VectorXd::Zero(n_p);
    layer.w_pb.resize(n_p, n_b);
    Rng rng(seed);
    for (int i = 0; i < n_p; ++i) {
        for (int j = 0; j < n_b; ++j) layer.w_pb(i, j) = rng.bernoulli(config.p_pb) ? 1.0 : 0.0;
    }
    return layer;
}

void pc_step(PlaceLayer& layer, const Eigen::VectorXd& bvc, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("pc_step: dt must be positive");
    const auto& dyn = layer.dynamics;
    const double recurrent = dyn.gamma_pp * layer.rates.sum();
    const double feedforward = dyn.gamma_pb * bvc.sum();
    const Eigen::VectorXd drive = (layer.w_pb * bvc).array() - feedforward - recurrent;
    layer.membrane += (dt / dyn.tau_p) * (drive - layer.membrane);
    layer.rates = (dyn.psi * layer.membrane).array().max(0.0).tanh().min(kMaxRate);
}

void oja_update(PlaceLayer& layer, const Eigen::VectorXd& bvc, double dt,
                const PlasticityConfig& config) {
    if (!(dt > 0.0)) throw std::invalid_argument("oja_update: dt must be positive");
    const double rate = dt / config.tau_w_pb;
    for (int i = 0; i < layer.n_p; ++i) {
        const double vp = layer.rates[i];
        if (vp == 0.0) continue;
        auto row = layer.w_pb.row(i);
        for (int j = 0; j < layer.n_b; ++j) {
            const double w = row[j] + rate * vp * (bvc[j] - vp * row[j] / config.alpha_pb);
            row[j] = w > 0.0 ? w : 0.0;
        }
    }
}

void trace_step(TraceState& traces, const Eigen::VectorXd& place_rates,
                const Eigen::VectorXd& head_rates, double dt, double tau_m) {
    if (!(dt > 0.0)) throw std::invalid_argument("trace_step: dt must be positive");
    const double a = dt / tau_m;
    traces.place += a * (place_rates - traces.place);
    traces.head += a * (head_rates - traces.head);
}

void adjacency_update(AdjacencyTensor& adjacency, const Eigen::VectorXd& place_rates,
                      const TraceState& traces, double dt, double tau_w_pp, double floor) {
    if (!(dt > 0.0)) throw std::invalid_argument("adjacency_update: dt must be positive");
    const int n_p = adjacency.cells();
    std::vector<int> active, support;
    std::vector<char> is_active(n_p, 0);
    for (int i = 0; i < n_p; ++i) {
        const bool a = place_rates[i] > 0.0;
        if (a) {
            active.push_back(i);
            is_active[i] = 1;
        }
        if (a || traces.place[i] > kTraceSupport) support.push_back(i);
    }
    if (active.empty()) return;

    for (int k = 0; k < adjacency.headings(); ++k) {
        const double gate = (dt / tau_w_pp) * traces.head[k];
        if (gate == 0.0) continue;
        for (int i : active) {
            for (int j : support) {
                if (j == i || (is_active[j] && j < i)) continue;
                const double diff = place_rates[i] * traces.place[j] - place_rates[j] * traces.place[i];
                if (diff == 0.0) continue;
                const double delta = gate * diff;
                adjacency.add(k, i, j, delta, floor);
                adjacency.add(k, j, i, -delta, floor);
            }
        }
    }
}

ActivitySnapshot snapshot_activity(const PlaceLayer& layer, std::int64_t step) {
    return {layer.rates, step};
}

}  // namespace placenav
