#include "placenav/model.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "placenav/random.hpp"

namespace placenav {
namespace {

constexpr const char* kSnapshotMagic = "placenav-snapshot";
constexpr int kSnapshotVersion = 1;

std::string hex(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex(const std::string& token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw std::runtime_error("snapshot: bad number '" + token + "'");
    }
    return v;
}

void expect(std::istream& in, const std::string& word) {
    std::string got;
    if (!(in >> got) || got != word) {
        throw std::runtime_error("snapshot: expected '" + word + "', got '" + got + "'");
    }
}

}  // namespace

Model::Model(const ModelConfig& config, const EnvironmentSpec& env, std::uint64_t seed)
    : config_(config), hd_(HeadDirectionLayer::make(config.n_hd, config.hd_anchor)) {
    config_.fusion.n_hd = config_.n_hd;
    for (std::size_t k = 0; k < config_.scales.size(); ++k) {
        auto& sc = config_.scales[k];
        if (sc.bvc_max_dist <= 0.0) sc.bvc_max_dist = 0.5 * env.diagonal();
        if (sc.n_bvc_norm <= 0.0) sc.n_bvc_norm = config_.world.n_res;

        ScaleStack s;
        s.config = sc;
        s.bvc = build_bvc_grid(sc.bvc_dirs, sc.bvc_dists, sc.bvc_max_dist, sc.sigma_r,
                               sc.sigma_theta, sc.n_bvc_norm);
        s.place = init_place_layer(sc.n_pc, s.bvc.size(), sc.dynamics, sc.plasticity,
                                   mix_seed(seed, k));
        s.traces = TraceState::zeros(sc.n_pc, config_.n_hd);
        s.adjacency = AdjacencyTensor(config_.n_hd, sc.n_pc);
        s.reward = RewardCell::zeros(sc.n_pc, config_.valuation.cap);
        s.reward.epsilon = config_.valuation.epsilon;
        s.buffer = ReplayBuffer(config_.valuation.buffer_capacity);
        scales_.push_back(std::move(s));
    }
}

void Model::reset_activity() {
    for (auto& s : scales_) {
        s.place.membrane.setZero();
        s.place.rates.setZero();
        s.traces = TraceState::zeros(s.place.n_p, config_.n_hd);
        s.buffer.clear();
    }
    hd_.rates.assign(hd_.preferred_dirs.size(), 0.0);
}

void Model::sense(const LidarScan& scan, Vec2 velocity, const Plasticity& plasticity,
                  std::int64_t step) {
    hd_.rates = hd_rates(hd_, velocity);
    const Eigen::VectorXd head = Eigen::Map<const Eigen::VectorXd>(
        hd_.rates.data(), static_cast<Eigen::Index>(hd_.rates.size()));
    for (auto& s : scales_) {
        const auto& pc = s.config.plasticity;
        s.bvc.rates = bvc_rates(s.bvc, scan);
        pc_step(s.place, s.bvc.rates, pc.dt);
        if (plasticity.place_fields) oja_update(s.place, s.bvc.rates, pc.dt, pc);
        trace_step(s.traces, s.place.rates, head, pc.dt, pc.tau_m);
        if (plasticity.adjacency) {
            adjacency_update(s.adjacency, s.place.rates, s.traces, pc.dt, pc.tau_w_pp,
                             pc.adjacency_floor);
        }
        if (plasticity.record) record_step(s.buffer, snapshot_activity(s.place, step));
    }
}

std::vector<ReplayStatus> Model::reward_goal() {
    std::vector<ReplayStatus> status;
    const TdConfig td{config_.valuation.eta, config_.valuation.reward};
    for (auto& s : scales_) {
        status.push_back(reverse_replay(s.reward, s.buffer, config_.valuation.tau_r));
        td_update(s.reward, s.place.rates, td);
        s.buffer.clear();
    }
    return status;
}

Eigen::VectorXd Model::settle_rates(int scale, const LidarScan& scan, int iterations) const {
    const auto& s = scales_.at(scale);
    PlaceLayer layer = s.place;
    layer.membrane.setZero();
    layer.rates.setZero();
    const Eigen::VectorXd bvc = bvc_rates(s.bvc, scan);
    for (int i = 0; i < iterations; ++i) pc_step(layer, bvc, s.config.plasticity.dt);
    return layer.rates;
}

std::vector<ScaleView> Model::views(const std::vector<int>& scale_indices) const {
    std::vector<ScaleView> out;
    for (int k : scale_indices) {
        const auto& s = scales_.at(k);
        out.push_back({&s.place, &s.adjacency, &s.reward});
    }
    return out;
}

std::string Model::serialize() const {
    std::ostringstream out;
    out << kSnapshotMagic << ' ' << kSnapshotVersion << '\n';
    out << "config " << config_to_json(config_) << '\n';
    out << "scales " << scales_.size() << '\n';
    for (std::size_t k = 0; k < scales_.size(); ++k) {
        const auto& s = scales_[k];
        out << "scale " << k << ' ' << s.place.n_p << ' ' << s.place.n_b << '\n';
        out << "w_pb\n";
        for (int i = 0; i < s.place.n_p; ++i) {
            for (int j = 0; j < s.place.n_b; ++j) out << (j ? " " : "") << hex(s.place.w_pb(i, j));
            out << '\n';
        }
        out << "w_r\n";
        for (int i = 0; i < s.place.n_p; ++i) out << (i ? " " : "") << hex(s.reward.weights[i]);
        out << '\n';
        const auto trip = s.adjacency.triplets();
        out << "w_pp " << trip.size() << '\n';
        for (const auto& t : trip) out << t.k << ' ' << t.post << ' ' << t.pre << ' ' << hex(t.value) << '\n';
    }
    out << "end\n";
    return out.str();
}

Model Model::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != kSnapshotMagic) throw std::runtime_error("snapshot: not a placenav snapshot");
    if (version != kSnapshotVersion) {
        throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
    }
    expect(in, "config");
    std::string json_line;
    std::getline(in, json_line);
    Model m;
    m.config_ = parse_config(json_line);
    m.hd_ = HeadDirectionLayer::make(m.config_.n_hd, m.config_.hd_anchor);

    expect(in, "scales");
    std::size_t n_scales = 0;
    in >> n_scales;
    if (n_scales != m.config_.scales.size()) throw std::runtime_error("snapshot: scale count mismatch");
    std::string tok;
    for (std::size_t k = 0; k < n_scales; ++k) {
        const auto& sc = m.config_.scales[k];
        std::size_t idx = 0;
        int n_p = 0, n_b = 0;
        expect(in, "scale");
        in >> idx >> n_p >> n_b;
        ScaleStack s;
        s.config = sc;
        s.bvc = build_bvc_grid(sc.bvc_dirs, sc.bvc_dists, sc.bvc_max_dist, sc.sigma_r,
                               sc.sigma_theta, sc.n_bvc_norm);
        if (idx != k || n_p != sc.n_pc || n_b != s.bvc.size()) {
            throw std::runtime_error("snapshot: layer shape does not match config");
        }
        s.place.n_p = n_p;
        s.place.n_b = n_b;
        s.place.dynamics = sc.dynamics;
        s.place.membrane = Eigen::VectorXd::Zero(n_p);
        s.place.rates = Eigen::VectorXd::Zero(n_p);
        s.place.w_pb.resize(n_p, n_b);
        expect(in, "w_pb");
        for (int i = 0; i < n_p; ++i) {
            for (int j = 0; j < n_b; ++j) {
                in >> tok;
                s.place.w_pb(i, j) = parse_hex(tok);
            }
        }
        s.reward = RewardCell::zeros(n_p, m.config_.valuation.cap);
        s.reward.epsilon = m.config_.valuation.epsilon;
        expect(in, "w_r");
        for (int i = 0; i < n_p; ++i) {
            in >> tok;
            s.reward.weights[i] = parse_hex(tok);
        }
        expect(in, "w_pp");
        std::size_t count = 0;
        in >> count;
        s.adjacency = AdjacencyTensor(m.config_.n_hd, n_p);
        for (std::size_t t = 0; t < count; ++t) {
            int kk = 0, post = 0, pre = 0;
            in >> kk >> post >> pre >> tok;
            if (!in || kk < 0 || kk >= m.config_.n_hd || post < 0 || post >= n_p || pre < 0 ||
                pre >= n_p) {
                throw std::runtime_error("snapshot: bad adjacency entry");
            }
            s.adjacency.set(kk, post, pre, parse_hex(tok));
        }
        s.traces = TraceState::zeros(n_p, m.config_.n_hd);
        s.buffer = ReplayBuffer(m.config_.valuation.buffer_capacity);
        m.scales_.push_back(std::move(s));
    }
    expect(in, "end");
    return m;
}

void Model::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot " + path.string());
    out << serialize();
}

Model Model::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

std::string Model::weights_hash() const { return fnv1a_hex(serialize()); }

}  // namespace placenav
