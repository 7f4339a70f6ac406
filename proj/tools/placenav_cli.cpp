#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "placenav/config.hpp"
#include "placenav/experiment.hpp"
#include "placenav/random.hpp"
#include "placenav/render.hpp"
#include "placenav/stats.hpp"
#include "placenav/world.hpp"

using namespace placenav;
namespace fs = std::filesystem;

namespace {

ModelConfig config_or_preset(const std::string& path) {
    if (path.empty() || path == "desk") return desk_preset();
    if (path == "full") return full_preset();
    return load_config(path);
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

const char* status_name(ReplayStatus s) {
    switch (s) {
        case ReplayStatus::applied: return "applied";
        case ReplayStatus::empty_buffer: return "empty_buffer";
        case ReplayStatus::zero_update: return "zero_update";
    }
    return "?";
}

void print_summary(const StatsSummary& s) {
    for (const auto& g : s.groups)
        std::cout << g.name << ": n=" << g.n << " mean=" << g.mean << " sem=" << g.sem << "\n";
    std::cout << "SSB=" << s.ss_between << " SSW=" << s.ss_within << " df=(" << s.df_between
              << ", " << s.df_within << ")";
    if (s.f)
        std::cout << " F=" << *s.f << " p=" << *s.p << "\n";
    else
        std::cout << " F=undefined (zero within-group variance)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiscale place-cell navigation simulator"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "config file, or 'desk' / 'full' preset")
        ->default_val("desk");

    auto* map_cmd = app.add_subcommand("map", "run the mapping phase and save a snapshot");
    std::string map_env, map_out = "snapshot.txt";
    int map_steps = -1;
    std::uint64_t map_seed = 0;
    bool map_seed_set = false;
    map_cmd->add_option("env", map_env, "environment file")->required()->check(CLI::ExistingFile);
    map_cmd->add_option("--steps", map_steps, "mapping steps (default from config)");
    map_cmd->add_option("--seed", map_seed, "seed (default from config)")
        ->each([&](const std::string&) { map_seed_set = true; });
    map_cmd->add_option("--out", map_out, "snapshot path");

    auto* seek_cmd = app.add_subcommand("seek", "one goal-seeking trial from the start pose");
    std::string seek_env, seek_snapshot, seek_strategy = "multiscale", seek_log, seek_save;
    bool seek_learn = false;
    int seek_max = 20000;
    std::uint64_t seek_seed = 1;
    seek_cmd->add_option("env", seek_env, "environment file")->required()->check(CLI::ExistingFile);
    seek_cmd->add_option("--snapshot", seek_snapshot, "model snapshot")
        ->required()
        ->check(CLI::ExistingFile);
    seek_cmd->add_option("--strategy", seek_strategy)
        ->check(CLI::IsMember({"small", "medium", "large", "multiscale"}));
    seek_cmd->add_flag("--learn", seek_learn, "plastic weights, replay and TD at the goal");
    seek_cmd->add_option("--max-steps", seek_max);
    seek_cmd->add_option("--seed", seek_seed);
    seek_cmd->add_option("--log", seek_log, "per-step decision log CSV");
    seek_cmd->add_option("--save", seek_save, "write the updated snapshot here");

    auto* exp1_cmd = app.add_subcommand("exp1", "fixed-map evaluation across environments");
    std::string exp1_config, exp1_out = "exp1_results.csv";
    exp1_cmd->add_option("config", exp1_config)->required()->check(CLI::ExistingFile);
    exp1_cmd->add_option("--out", exp1_out, "results CSV");

    auto* exp2_cmd = app.add_subcommand("exp2", "tabula-rasa policy learning");
    std::string exp2_config, exp2_out = "exp2_results.csv", exp2_episodes;
    exp2_cmd->add_option("config", exp2_config)->required()->check(CLI::ExistingFile);
    exp2_cmd->add_option("--out", exp2_out, "results CSV");
    exp2_cmd->add_option("--episodes-out", exp2_episodes, "per-episode summary CSV");

    auto* render_cmd = app.add_subcommand("render", "write a heatmap from a snapshot");
    std::string render_what, render_snapshot, render_env, render_out = "map.pgm", render_csv;
    int render_scale = 0, render_res = 50, render_cell = -1, render_mosaic = 0;
    render_cmd->add_option("what", render_what)
        ->required()
        ->check(CLI::IsMember({"placefields", "rewardmap"}));
    render_cmd->add_option("--snapshot", render_snapshot)->required()->check(CLI::ExistingFile);
    render_cmd->add_option("--env", render_env, "environment file")
        ->required()
        ->check(CLI::ExistingFile);
    render_cmd->add_option("--scale", render_scale)->required();
    render_cmd->add_option("--out", render_out, "PGM path");
    render_cmd->add_option("--resolution", render_res)->check(CLI::Range(2, 4096));
    render_cmd->add_option("--cell", render_cell, "single place cell (default: strongest)");
    render_cmd->add_option("--mosaic", render_mosaic, "tile the N strongest cells instead");
    render_cmd->add_option("--csv", render_csv, "also write the sampled values as CSV");

    auto* stats_cmd = app.add_subcommand("stats", "per-strategy summary and one-way ANOVA");
    std::string stats_csv, stats_env;
    int stats_from = 0;
    stats_cmd->add_option("results", stats_csv)->required()->check(CLI::ExistingFile);
    stats_cmd->add_option("--environment", stats_env, "only rows from this environment");
    stats_cmd->add_option("--from-episode", stats_from, "skip earlier episodes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*map_cmd) {
            ModelConfig cfg = config_or_preset(config_path);
            if (map_seed_set) cfg.seed = map_seed;
            const auto env = load_environment(map_env);
            Model model(cfg, env, mix_seed(cfg.seed, 100));
            const int steps = map_steps >= 0 ? map_steps : cfg.mapping_steps;
            run_mapping_phase(model, env, steps, mix_seed(cfg.seed, 200));
            model.save(map_out);
            std::cout << "mapped " << env.name << " for " << steps << " steps -> " << map_out
                      << " (" << model.weights_hash() << ")\n";
        } else if (*seek_cmd) {
            Model model = Model::load(seek_snapshot);
            const auto env = load_environment(seek_env);
            GoalSeekOptions opt;
            opt.max_steps = seek_max;
            opt.learning = seek_learn;
            opt.keep_log = !seek_log.empty();
            const auto strategy = StrategySpec::named(seek_strategy, model.n_scales());
            const auto res = run_goal_seeking(env, model, strategy, opt, seek_seed);
            const auto& r = res.record;
            std::cout << r.strategy << " " << env.name << ": "
                      << (r.reached_goal ? "reached goal" : "timed out") << " after "
                      << r.step_count << " steps (" << r.sim_time << " s)\n";
            for (std::size_t k = 0; k < res.replay.size(); ++k)
                std::cout << "scale " << k << " replay: " << status_name(res.replay[k]) << "\n";
            if (opt.keep_log) {
                auto out = open_out(seek_log);
                write_decision_log(out, res.trajectory, model.n_scales());
            }
            if (!seek_save.empty()) model.save(seek_save);
        } else if (*exp1_cmd) {
            const auto cfg = load_config(exp1_config);
            const auto res = run_experiment1(cfg);
            auto out = open_out(exp1_out);
            write_trials_csv(out, res.rows, config_hash(cfg));
            std::cout << res.rows.size() << " trials -> " << exp1_out << "\n";
        } else if (*exp2_cmd) {
            const auto cfg = load_config(exp2_config);
            const auto res = run_experiment2(cfg);
            auto out = open_out(exp2_out);
            write_trials_csv(out, res.rows, config_hash(cfg));
            if (!exp2_episodes.empty()) {
                auto ep = open_out(exp2_episodes);
                write_episode_csv(ep, res.episodes);
            }
            std::cout << res.rows.size() << " episodes -> " << exp2_out << "\n";
        } else if (*render_cmd) {
            const Model model = Model::load(render_snapshot);
            const auto env = load_environment(render_env);
            if (render_scale < 0 || render_scale >= model.n_scales())
                throw std::invalid_argument("--scale out of range");
            const auto grid = SampleGrid::over(env, render_res, render_res);
            Eigen::VectorXd values;
            if (render_what == "rewardmap") {
                values = sample_reward_map(model, env, render_scale, grid);
            } else {
                const auto fields = sample_place_fields(model, env, render_scale, grid);
                if (render_mosaic > 0) {
                    write_field_mosaic(render_out, grid, fields, render_mosaic);
                    std::cout << "wrote " << render_out << "\n";
                    return 0;
                }
                Eigen::Index cell = render_cell;
                if (cell < 0) fields.colwise().maxCoeff().maxCoeff(&cell);
                if (cell >= fields.cols()) throw std::invalid_argument("--cell out of range");
                values = fields.col(cell);
            }
            write_pgm(render_out, grid, values);
            if (!render_csv.empty()) {
                auto out = open_out(render_csv);
                write_grid_csv(out, grid, values);
            }
            std::cout << "wrote " << render_out << "\n";
        } else if (*stats_cmd) {
            std::ifstream in(stats_csv);
            const auto rows = read_trials_csv(in);
            std::map<std::string, std::vector<double>> by_strategy;
            for (const auto& r : rows) {
                if (!stats_env.empty() && r.environment != stats_env) continue;
                if (r.episode < stats_from) continue;
                by_strategy[r.strategy].push_back(r.step_count);
            }
            std::vector<std::vector<double>> groups;
            std::vector<std::string> names;
            for (auto& [name, v] : by_strategy) {
                names.push_back(name);
                groups.push_back(std::move(v));
            }
            print_summary(summarize(groups, names));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
