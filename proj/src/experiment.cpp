#include "placenav/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "placenav/random.hpp"

namespace placenav {
namespace {

std::uint32_t bitmask(const std::vector<int>& indices) {
    std::uint32_t m = 0;
    for (int i : indices) m |= 1u << i;
    return m;
}

std::uint32_t bitmask(const std::vector<bool>& flags) {
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i]) m |= 1u << i;
    }
    return m;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

StrategySpec StrategySpec::named(const std::string& name, int n_scales) {
    static const std::map<std::string, int> single{{"small", 0}, {"medium", 1}, {"large", 2}};
    if (name == "multiscale") {
        StrategySpec s{name, {}};
        for (int k = 0; k < n_scales; ++k) s.scales.push_back(k);
        return s;
    }
    const auto it = single.find(name);
    if (it == single.end() || it->second >= n_scales) {
        throw std::invalid_argument("unknown strategy '" + name + "'");
    }
    return {name, {it->second}};
}

std::vector<StrategySpec> StrategySpec::standard(int n_scales) {
    std::vector<StrategySpec> out;
    const char* names[] = {"small", "medium", "large"};
    for (int k = 0; k < std::min(n_scales, 3); ++k) out.push_back(named(names[k], n_scales));
    out.push_back(named("multiscale", n_scales));
    return out;
}

void run_mapping_phase(Model& model, const EnvironmentSpec& env, int steps, std::uint64_t seed) {
    if (steps <= 0) throw std::invalid_argument("run_mapping_phase: steps must be positive");
    const auto& cfg = model.config();
    model.reset_activity();
    Rng rng(seed);
    AgentState state{env.start.position, env.start.heading, {}};
    for (int t = 0; t < steps; ++t) {
        const LidarScan scan = raycast(env, state, cfg.world.n_res, cfg.world.max_range);
        model.sense(scan, state.velocity, Plasticity::all(), t);
        const double heading =
            explore_step(state.heading, rng, scan, cfg.fusion.d_safe, cfg.explore, cfg.n_hd);
        state = step_agent(env, state, heading, cfg.world.step_len, cfg.world.collision_margin);
    }
}

GoalSeekResult run_goal_seeking(const EnvironmentSpec& env, Model& model,
                                const StrategySpec& strategy, const GoalSeekOptions& options,
                                std::uint64_t seed) {
    const auto& cfg = model.config();
    model.reset_activity();
    Rng rng(seed);
    AgentState state{env.start.position, env.start.heading, {}};
    ModeState mode;
    const auto views = model.views(strategy.scales);
    const Plasticity plasticity = options.learning ? Plasticity::all() : Plasticity::frozen();

    GoalSeekResult res;
    res.record.strategy = strategy.name;
    res.record.environment = env.name;
    res.record.seed = seed;

    int steps = 0;
    for (std::int64_t t = 0;; ++t) {
        const LidarScan scan = raycast(env, state, cfg.world.n_res, cfg.world.max_range);
        model.sense(scan, state.velocity, plasticity, t);
        if (in_goal(state, env)) {
            res.record.reached_goal = true;
            if (options.learning) res.replay = model.reward_goal();
            break;
        }
        if (steps >= options.max_steps) break;

        StepRecord rec;
        rec.step = steps;
        double heading = 0.0;
        if (mode.mode == Mode::exploiting) {
            const Decision d = decide(views, scan, mode, cfg.fusion, cfg.explore);
            if (options.keep_log) {
                rec.valid_mask = bitmask(d.profile.valid);
                rec.alpha = d.profile.alpha;
                rec.dominant_scale = d.profile.dominant_scale();
                rec.theta = d.profile.theta;
                rec.masked_mask = bitmask(d.profile.masked);
            }
            heading = d.kind == ActionKind::move
                          ? d.heading
                          : explore_step(state.heading, rng, scan, cfg.fusion.d_safe, cfg.explore,
                                         cfg.n_hd);
        } else {
            heading = explore_step(state.heading, rng, scan, cfg.fusion.d_safe, cfg.explore, cfg.n_hd);
        }
        const bool exploring = mode.mode == Mode::exploring;
        rec.mode = mode.mode;
        if (exploring) mode.tick_exploration();

        state = step_agent(env, state, heading, cfg.world.step_len, cfg.world.collision_margin);
        ++steps;
        if (!exploring) loop_guard(mode, {state.position, state.heading}, cfg.explore);

        if (options.keep_log) {
            rec.position = state.position;
            rec.heading = state.heading;
            res.trajectory.push_back(std::move(rec));
        }
    }
    res.record.step_count = steps;
    res.record.sim_time = steps * cfg.world.seconds_per_step;
    return res;
}

Experiment1Result run_experiment1(const ModelConfig& config,
                                  const std::vector<EnvironmentSpec>& environments) {
    Experiment1Result out;
    const int n_scales = static_cast<int>(config.scales.size());
    const auto strategies = StrategySpec::standard(n_scales);
    for (std::size_t e = 0; e < environments.size(); ++e) {
        const auto& env = environments[e];
        Model model(config, env, mix_seed(config.seed, 100 + e));
        run_mapping_phase(model, env, config.mapping_steps, mix_seed(config.seed, 200 + e));
        GoalSeekOptions learn;
        learn.max_steps = config.exp1.learning_max_steps;
        learn.learning = true;
        run_goal_seeking(env, model, StrategySpec::named("multiscale", n_scales), learn,
                         mix_seed(config.seed, 300 + e));
        const std::string hash = model.weights_hash();
        out.snapshot_hashes.push_back(hash);

        GoalSeekOptions eval;
        eval.max_steps = config.exp1.max_steps;
        for (const auto& strategy : strategies) {
            for (int trial = 0; trial < config.exp1.trials; ++trial) {
                const std::uint64_t seed = mix_seed(config.seed, 10000 * (e + 1) + trial);
                auto res = run_goal_seeking(env, model, strategy, eval, seed);
                res.record.trial = trial;
                res.record.snapshot_hash = hash;
                out.rows.push_back(res.record);
            }
        }
    }
    return out;
}

Experiment1Result run_experiment1(const ModelConfig& config) {
    std::vector<EnvironmentSpec> envs;
    for (const auto& path : config.exp1.environments) envs.push_back(load_environment(path));
    if (envs.empty()) throw std::invalid_argument("exp1: no environments configured");
    return run_experiment1(config, envs);
}

Experiment2Result run_experiment2(const ModelConfig& config, const EnvironmentSpec& env) {
    Experiment2Result out;
    const int n_scales = static_cast<int>(config.scales.size());
    const int episodes = config.exp2.episodes;
    const int runs = config.exp2.runs;
    for (const auto& strategy : StrategySpec::standard(n_scales)) {
        std::vector<std::vector<double>> steps(episodes);
        for (int run = 0; run < runs; ++run) {
            Model model(config, env, mix_seed(config.seed, 400 + run));
            for (int ep = 0; ep < episodes; ++ep) {
                GoalSeekOptions opt;
                opt.max_steps = config.exp2.episode_step_cap;
                opt.learning = true;
                const std::uint64_t seed = mix_seed(config.seed, 100000 * (run + 1) + ep);
                auto res = run_goal_seeking(env, model, strategy, opt, seed);
                res.record.trial = run;
                res.record.episode = ep;
                steps[ep].push_back(res.record.step_count);
                out.rows.push_back(res.record);
            }
        }
        std::vector<double> deltas;
        double prev = 0.0;
        for (int ep = 0; ep < episodes; ++ep) {
            const auto& v = steps[ep];
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            const double sem =
                v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(v.size()) : 0.0;
            const double delta = ep == 0 ? 0.0 : mean - prev;
            if (ep > 0) deltas.push_back(delta);
            out.episodes.push_back({strategy.name, ep, mean, sem, delta});
            prev = mean;
        }
        out.delta_steps.emplace_back(strategy.name, std::move(deltas));
    }
    return out;
}

Experiment2Result run_experiment2(const ModelConfig& config) {
    if (config.exp2.environment.empty()) throw std::invalid_argument("exp2: no environment configured");
    return run_experiment2(config, load_environment(config.exp2.environment));
}

std::string config_hash(const ModelConfig& config) { return fnv1a_hex(config_to_json(config)); }

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& rows,
                      const std::string& config_hash) {
    out << "strategy,environment,trial,episode,step_count,reached_goal,sim_time,seed,snapshot_hash,"
           "config_hash\n";
    for (const auto& r : rows) {
        out << r.strategy << ',' << r.environment << ',' << r.trial << ',' << r.episode << ','
            << r.step_count << ',' << (r.reached_goal ? 1 : 0) << ',' << fmt("%.3f", r.sim_time)
            << ',' << r.seed << ',' << r.snapshot_hash << ',' << config_hash << '\n';
    }
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("results csv: empty input");
    const auto header = split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"strategy", "step_count"}) {
        if (!col.count(need)) throw std::runtime_error(std::string("results csv: missing column ") + need);
    }
    auto get = [&](const std::vector<std::string>& cells, const char* name) -> std::string {
        const auto it = col.find(name);
        return it == col.end() || it->second >= cells.size() ? std::string() : cells[it->second];
    };
    std::vector<TrialRecord> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        TrialRecord r;
        r.strategy = get(cells, "strategy");
        r.environment = get(cells, "environment");
        const auto num = [](const std::string& s) { return s.empty() ? 0.0 : std::stod(s); };
        r.trial = static_cast<int>(num(get(cells, "trial")));
        r.episode = static_cast<int>(num(get(cells, "episode")));
        r.step_count = static_cast<int>(num(get(cells, "step_count")));
        r.reached_goal = get(cells, "reached_goal") == "1";
        r.sim_time = num(get(cells, "sim_time"));
        const auto seed = get(cells, "seed");
        r.seed = seed.empty() ? 0 : std::stoull(seed);
        r.snapshot_hash = get(cells, "snapshot_hash");
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_episode_csv(std::ostream& out, const std::vector<EpisodeSummary>& rows) {
    out << "strategy,episode,mean_steps,sem_steps,delta_steps\n";
    for (const auto& r : rows) {
        out << r.strategy << ',' << r.episode << ',' << fmt("%.4f", r.mean_steps) << ','
            << fmt("%.4f", r.sem_steps) << ',' << fmt("%.4f", r.delta_steps) << '\n';
    }
}

void write_decision_log(std::ostream& out, const std::vector<StepRecord>& steps, int n_scales) {
    out << "step,x,y,heading,mode,valid_mask";
    for (int k = 0; k < n_scales; ++k) out << ",alpha_" << k;
    out << ",dominant_scale,theta_star,masked_mask\n";
    for (const auto& s : steps) {
        out << s.step << ',' << fmt("%.6f", s.position.x) << ',' << fmt("%.6f", s.position.y) << ','
            << fmt("%.6f", s.heading) << ',' << (s.mode == Mode::exploring ? "explore" : "exploit")
            << ',' << s.valid_mask;
        for (int k = 0; k < n_scales; ++k) {
            out << ',' << (k < static_cast<int>(s.alpha.size()) ? fmt("%.6f", s.alpha[k]) : "0.000000");
        }
        out << ',' << s.dominant_scale << ',' << (s.theta ? fmt("%.6f", *s.theta) : "") << ','
            << s.masked_mask << '\n';
    }
}

}  // namespace placenav
