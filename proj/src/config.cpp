#include "placenav/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "placenav/geometry.hpp"

namespace placenav {
namespace {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

ScaleConfig make_scale(std::string name, double sigma_r, int n_pc, double gamma_pb,
                       double gamma_pp, double alpha_pb) {
    ScaleConfig s;
    s.name = std::move(name);
    s.sigma_r = sigma_r;
    s.sigma_theta = 0.2;
    s.n_pc = n_pc;
    s.dynamics.tau_p = 2.0;
    s.dynamics.psi = 3.0;
    s.dynamics.gamma_pb = gamma_pb;
    s.dynamics.gamma_pp = gamma_pp;
    s.plasticity.alpha_pb = alpha_pb;
    s.plasticity.tau_w_pp = 1.0;
    return s;
}

void read_scale(const json& j, ScaleConfig& s) {
    read(j, "name", s.name);
    read(j, "sigma_r", s.sigma_r);
    read(j, "sigma_theta", s.sigma_theta);
    read(j, "n_pc", s.n_pc);
    read(j, "bvc_dirs", s.bvc_dirs);
    read(j, "bvc_dists", s.bvc_dists);
    read(j, "bvc_max_dist", s.bvc_max_dist);
    read(j, "n_bvc_norm", s.n_bvc_norm);
    read(j, "tau_p", s.dynamics.tau_p);
    read(j, "psi", s.dynamics.psi);
    read(j, "gamma_pb", s.dynamics.gamma_pb);
    read(j, "gamma_pp", s.dynamics.gamma_pp);
    read(j, "tau_w_pb", s.plasticity.tau_w_pb);
    read(j, "alpha_pb", s.plasticity.alpha_pb);
    read(j, "p_pb", s.plasticity.p_pb);
    read(j, "tau_m", s.plasticity.tau_m);
    read(j, "tau_w_pp", s.plasticity.tau_w_pp);
    read(j, "dt", s.plasticity.dt);
    read(j, "adjacency_floor", s.plasticity.adjacency_floor);
}

json write_scale(const ScaleConfig& s) {
    return {{"name", s.name},
            {"sigma_r", s.sigma_r},
            {"sigma_theta", s.sigma_theta},
            {"n_pc", s.n_pc},
            {"bvc_dirs", s.bvc_dirs},
            {"bvc_dists", s.bvc_dists},
            {"bvc_max_dist", s.bvc_max_dist},
            {"n_bvc_norm", s.n_bvc_norm},
            {"tau_p", s.dynamics.tau_p},
            {"psi", s.dynamics.psi},
            {"gamma_pb", s.dynamics.gamma_pb},
            {"gamma_pp", s.dynamics.gamma_pp},
            {"tau_w_pb", s.plasticity.tau_w_pb},
            {"alpha_pb", s.plasticity.alpha_pb},
            {"p_pb", s.plasticity.p_pb},
            {"tau_m", s.plasticity.tau_m},
            {"tau_w_pp", s.plasticity.tau_w_pp},
            {"dt", s.plasticity.dt},
            {"adjacency_floor", s.plasticity.adjacency_floor}};
}

void validate(const ModelConfig& c) {
    if (c.scales.empty()) throw std::invalid_argument("config: at least one scale required");
    if (c.n_hd < 2) throw std::invalid_argument("config: n_hd must be >= 2");
    if (!(c.world.step_len > 0.0)) throw std::invalid_argument("config: step_len must be > 0");
    if (!(c.fusion.validity_threshold > 0.0)) {
        throw std::invalid_argument("config: validity_threshold must be > 0");
    }
    if (c.fusion.d_safe < 0.0) throw std::invalid_argument("config: d_safe must be >= 0");
    if (!(c.valuation.eta > 0.0)) throw std::invalid_argument("config: eta must be > 0");
    for (const auto& s : c.scales) {
        const auto& p = s.plasticity;
        if (s.n_pc < 1) throw std::invalid_argument("config: scale " + s.name + " has no cells");
        if (!(s.dynamics.tau_p > 0.0 && p.tau_w_pb > 0.0 && p.tau_m > 0.0 && p.tau_w_pp > 0.0 &&
              p.dt > 0.0)) {
            throw std::invalid_argument("config: scale " + s.name + " time constants must be > 0");
        }
        if (!(p.p_pb > 0.0 && p.p_pb <= 1.0)) {
            throw std::invalid_argument("config: scale " + s.name + " p_pb must be in (0, 1]");
        }
        if (!(p.alpha_pb > 0.0)) {
            throw std::invalid_argument("config: scale " + s.name + " alpha_pb must be > 0");
        }
    }
}

}  // namespace

ModelConfig full_preset() {
    ModelConfig c;
    c.world.n_res = 720;
    c.world.step_len = 0.1;
    c.scales = {make_scale("small", 0.5, 2000, 0.40, 0.05, 5.0),
                make_scale("medium", 2.0, 500, 0.29, 0.05, 4.0),
                make_scale("large", 4.0, 250, 0.27, 0.05, 8.0)};
    c.mapping_steps = 30000;
    c.exp1.trials = 20;
    c.exp2.episodes = 51;
    c.exp2.runs = 5;
    return c;
}

ModelConfig desk_preset() {
    ModelConfig c = full_preset();
    c.world.n_res = 360;
    c.scales = {make_scale("small", 0.5, 200, 0.40, 0.05, 5.0),
                make_scale("medium", 2.0, 80, 0.29, 0.05, 4.0),
                make_scale("large", 4.0, 40, 0.27, 0.05, 8.0)};
    c.mapping_steps = 5000;
    c.exp1.trials = 10;
    c.exp2.episodes = 15;
    c.exp2.runs = 3;
    return c;
}

ModelConfig parse_config(const std::string& json_text) {
    const json j = json::parse(json_text);
    ModelConfig c = j.value("preset", std::string("desk")) == "full" ? full_preset() : desk_preset();

    if (j.contains("world")) {
        const auto& w = j["world"];
        read(w, "n_res", c.world.n_res);
        read(w, "max_range", c.world.max_range);
        read(w, "step_len", c.world.step_len);
        read(w, "collision_margin", c.world.collision_margin);
        read(w, "seconds_per_step", c.world.seconds_per_step);
    }
    if (j.contains("head_direction")) {
        const auto& h = j["head_direction"];
        read(h, "n_hd", c.n_hd);
        if (h.contains("anchor_deg")) c.hd_anchor = deg2rad(h["anchor_deg"].get<double>());
    }
    if (j.contains("scales")) {
        const auto& arr = j["scales"];
        std::vector<ScaleConfig> scales;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            ScaleConfig s = i < c.scales.size() ? c.scales[i] : c.scales.back();
            read_scale(arr[i], s);
            scales.push_back(s);
        }
        c.scales = std::move(scales);
    }
    if (j.contains("valuation")) {
        const auto& v = j["valuation"];
        read(v, "tau_r", c.valuation.tau_r);
        read(v, "buffer_capacity", c.valuation.buffer_capacity);
        read(v, "eta", c.valuation.eta);
        read(v, "reward", c.valuation.reward);
        read(v, "cap", c.valuation.cap);
        read(v, "epsilon", c.valuation.epsilon);
    }
    if (j.contains("fusion")) {
        const auto& f = j["fusion"];
        read(f, "validity_threshold", c.fusion.validity_threshold);
        read(f, "d_safe", c.fusion.d_safe);
        read(f, "epsilon", c.fusion.epsilon);
        read(f, "wraparound_variation", c.fusion.wraparound_variation);
    }
    if (j.contains("explore")) {
        const auto& e = j["explore"];
        if (e.contains("sigma_turn_deg")) c.explore.sigma_turn = deg2rad(e["sigma_turn_deg"].get<double>());
        read(e, "explore_duration", c.explore.explore_duration);
        read(e, "loop_window", c.explore.loop_window);
        read(e, "loop_displacement", c.explore.loop_displacement);
        read(e, "resample_tries", c.explore.resample_tries);
    }
    if (j.contains("experiment")) {
        const auto& x = j["experiment"];
        read(x, "mapping_steps", c.mapping_steps);
        read(x, "seed", c.seed);
        if (x.contains("exp1")) {
            const auto& e1 = x["exp1"];
            read(e1, "environments", c.exp1.environments);
            read(e1, "trials", c.exp1.trials);
            read(e1, "max_steps", c.exp1.max_steps);
            read(e1, "learning_max_steps", c.exp1.learning_max_steps);
        }
        if (x.contains("exp2")) {
            const auto& e2 = x["exp2"];
            read(e2, "environment", c.exp2.environment);
            read(e2, "episodes", c.exp2.episodes);
            read(e2, "runs", c.exp2.runs);
            read(e2, "episode_step_cap", c.exp2.episode_step_cap);
            read(e2, "analysis_start_episode", c.exp2.analysis_start_episode);
        }
    }
    c.fusion.n_hd = c.n_hd;
    validate(c);
    return c;
}

ModelConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    ModelConfig c = parse_config(buf.str());
    const auto base = path.parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
    };
    for (auto& e : c.exp1.environments) resolve(e);
    resolve(c.exp2.environment);
    return c;
}

std::string config_to_json(const ModelConfig& c) {
    json scales = json::array();
    for (const auto& s : c.scales) scales.push_back(write_scale(s));
    const json j = {
        {"world",
         {{"n_res", c.world.n_res},
          {"max_range", c.world.max_range},
          {"step_len", c.world.step_len},
          {"collision_margin", c.world.collision_margin},
          {"seconds_per_step", c.world.seconds_per_step}}},
        {"head_direction", {{"n_hd", c.n_hd}, {"anchor_deg", rad2deg(c.hd_anchor)}}},
        {"scales", scales},
        {"valuation",
         {{"tau_r", c.valuation.tau_r},
          {"buffer_capacity", c.valuation.buffer_capacity},
          {"eta", c.valuation.eta},
          {"reward", c.valuation.reward},
          {"cap", c.valuation.cap},
          {"epsilon", c.valuation.epsilon}}},
        {"fusion",
         {{"validity_threshold", c.fusion.validity_threshold},
          {"d_safe", c.fusion.d_safe},
          {"epsilon", c.fusion.epsilon},
          {"wraparound_variation", c.fusion.wraparound_variation}}},
        {"explore",
         {{"sigma_turn_deg", rad2deg(c.explore.sigma_turn)},
          {"explore_duration", c.explore.explore_duration},
          {"loop_window", c.explore.loop_window},
          {"loop_displacement", c.explore.loop_displacement},
          {"resample_tries", c.explore.resample_tries}}},
        {"experiment",
         {{"mapping_steps", c.mapping_steps},
          {"seed", c.seed},
          {"exp1",
           {{"environments", c.exp1.environments},
            {"trials", c.exp1.trials},
            {"max_steps", c.exp1.max_steps},
            {"learning_max_steps", c.exp1.learning_max_steps}}},
          {"exp2",
           {{"environment", c.exp2.environment},
            {"episodes", c.exp2.episodes},
            {"runs", c.exp2.runs},
            {"episode_step_cap", c.exp2.episode_step_cap},
            {"analysis_start_episode", c.exp2.analysis_start_episode}}}}}};
    return j.dump();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace placenav
