// qdpa: command-line front end for training runs, configuration sweeps,
// the exhaustive oracle, sample-complexity numbers and reward surfaces.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qdpa/qdpa.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> num_seeds;
    std::optional<std::string> out;
    std::optional<int> k_max;
    std::optional<std::uint64_t> frames;
    std::optional<std::string> mode;
    std::optional<std::string> state_model;
    std::optional<std::string> reward;
    std::optional<unsigned> workers;
    bool exhaustive = false;
};

void add_common(CLI::App* app, CommonOptions& o)
{
    app->add_option("--config", o.config, "JSON run configuration (defaults apply to missing keys)");
    app->add_option("--seed", o.seed, "run a single seed");
    app->add_option("--num-seeds", o.num_seeds, "run seeds 1..N")->check(CLI::PositiveNumber);
    app->add_option("--out", o.out, "output directory");
    app->add_option("--k-max", o.k_max, "number of FBSs to deploy")->check(CLI::PositiveNumber);
    app->add_option("--frames", o.frames, "training frames per FBS")->check(CLI::PositiveNumber);
    app->add_option("--mode", o.mode, "learning mode")->check(CLI::IsMember({"IL", "CL"}));
    app->add_option("--state-model", o.state_model, "state set")->check(CLI::IsMember({"X1", "X2", "Full"}));
    app->add_option("--reward", o.reward, "reward kind")
        ->check(CLI::IsMember({"proposed", "quadratic", "exponential", "proximity"}));
    app->add_option("--workers", o.workers, "parallel seed replicas (0 = all cores)");
    app->add_flag("--exhaustive", o.exhaustive, "also run the exhaustive baseline where within budget");
}

qdpa::RunConfig resolve_config(const CommonOptions& o)
{
    qdpa::RunConfig cfg;
    if (!o.config.empty()) {
        if (!std::filesystem::exists(o.config)) throw usage_error("config file '" + o.config + "' not found");
        cfg = qdpa::load_run_config(o.config);
    }
    if (o.num_seeds) cfg.seeds = qdpa::default_seeds(*o.num_seeds);
    if (o.seed) cfg.seeds = {*o.seed};
    if (o.out) cfg.output_dir = *o.out;
    if (o.k_max) cfg.k_max = *o.k_max;
    if (o.frames) cfg.learning.training_frames = *o.frames;
    if (o.mode) cfg.learning.mode = qdpa::learning_mode_from_string(*o.mode);
    if (o.state_model) cfg.state_model = qdpa::state_model_from_string(*o.state_model);
    if (o.reward) cfg.reward.kind = qdpa::reward_kind_from_string(*o.reward);
    if (o.workers) cfg.workers = *o.workers;
    if (o.exhaustive) cfg.baselines.exhaustive = true;
    qdpa::validate(cfg);
    return cfg;
}

void print_warnings(const qdpa::RunResult& res)
{
    for (const auto& s : res.seeds)
        for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_train(const CommonOptions& o)
{
    const qdpa::RunConfig cfg = resolve_config(o);
    const qdpa::RunResult res = qdpa::run_incremental(cfg);
    print_warnings(res);
    qdpa::write_run(res, cfg, cfg.output_dir);
    std::cout << "wrote " << res.records.size() << " records to " << cfg.output_dir << '\n';
    return 0;
}

int cmd_sweep(const CommonOptions& o, const std::string& axis)
{
    const qdpa::RunConfig cfg = resolve_config(o);
    const qdpa::Comparison c =
        axis == "configs"
            ? qdpa::compare_configurations(cfg)
            : qdpa::compare_rewards(cfg, {qdpa::RewardKind::Proposed, qdpa::RewardKind::Quadratic,
                                          qdpa::RewardKind::Exponential, qdpa::RewardKind::Proximity});
    for (const auto& r : c.runs) print_warnings(r.result);
    qdpa::write_comparison(c, cfg.output_dir);
    std::cout << qdpa::ranking_table(c);
    return 0;
}

struct OracleOptions {
    std::string scenario;
    std::string save_scenario;
    int k_active = 0;
    std::uint64_t max_joint = qdpa::kDefaultJointBudget;
    double step_db = 0.0;
    unsigned workers = 0;
};

int cmd_oracle(const CommonOptions& o, const OracleOptions& oo)
{
    qdpa::Scenario sc;
    qdpa::ScenarioConfig grid_cfg;
    if (!oo.scenario.empty()) {
        if (!std::filesystem::exists(oo.scenario)) throw usage_error("scenario file '" + oo.scenario + "' not found");
        sc = qdpa::load_scenario(oo.scenario);
        grid_cfg = sc.config;
    } else {
        if (oo.k_active < 1) throw usage_error("oracle needs --scenario or --k-active");
        qdpa::RunConfig cfg = resolve_config(o);
        cfg.scenario.seed = cfg.seeds.front();
        sc = qdpa::build_scenario(cfg.scenario, oo.k_active);
        grid_cfg = cfg.scenario;
    }
    if (!oo.save_scenario.empty()) qdpa::save_scenario(sc, oo.save_scenario);
    const double step = oo.step_db > 0.0 ? oo.step_db : grid_cfg.fbs_step_db;
    const qdpa::ActionSet grid = qdpa::action_set(grid_cfg.fbs_pmin_dbm, grid_cfg.fbs_pmax_dbm, step);
    const qdpa::SolveResult res = qdpa::exhaustive_search(sc.network(), grid, oo.max_joint, oo.workers);
    std::cout << qdpa::solve_result_json(res).dump(2) << '\n';
    return 0;
}

struct ComplexityOptions {
    double rmax = 1.0, beta = 0.9, eps = 0.1, delta = 0.1;
    double states = 1, actions = 1;
    std::optional<double> t;
};

int cmd_complexity(const ComplexityOptions& c)
{
    const std::uint64_t t_min = qdpa::min_iterations(c.rmax, c.beta, c.eps, c.delta, c.states, c.actions);
    const double t_eval = c.t.value_or(static_cast<double>(t_min));
    qdpa::json out = {
        {"t_iterations", t_min},
        {"l_frames", qdpa::training_length(t_min, static_cast<std::uint64_t>(c.states),
                                           static_cast<std::uint64_t>(c.actions))},
        {"epsilon_bound_t", t_eval},
        {"epsilon_bound", qdpa::epsilon_bound({c.rmax, c.beta, c.eps, c.delta, c.states, c.actions, t_eval})}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct SurfaceOptions {
    std::optional<int> m;
    std::optional<double> bias;
    double r0_max = 8.0, rk_max = 8.0, dist = 45.0;
    std::size_t n = 41;
    std::string file;
};

int cmd_surface(const CommonOptions& o, const SurfaceOptions& s)
{
    qdpa::RunConfig cfg = resolve_config(o);
    if (s.m) cfg.reward.m = *s.m;
    if (s.bias) cfg.reward.bias_c = *s.bias;
    qdpa::validate(cfg.reward);
    const double g0 = cfg.scenario.gamma0_threshold();
    const double gk = cfg.scenario.gammak_threshold();
    if (s.file.empty()) {
        qdpa::write_reward_surface(std::cout, cfg.reward, g0, gk, s.dist, s.r0_max, s.rk_max, s.n);
    } else {
        std::ofstream f(s.file);
        if (!f) throw qdpa::io_error("cannot open '" + s.file + "' for writing");
        qdpa::write_reward_surface(f, cfg.reward, g0, gk, s.dist, s.r0_max, s.rk_max, s.n);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Q-learning power allocation for femtocell networks"};
    app.require_subcommand(1);

    CommonOptions train_o, sweep_o, oracle_o, surface_o;
    auto* train = app.add_subcommand("train", "incremental deployment run");
    add_common(train, train_o);

    std::string axis = "configs";
    auto* sweep = app.add_subcommand("sweep", "compare learning configurations or rewards");
    add_common(sweep, sweep_o);
    sweep->add_option("--axis", axis, "configs (IL/CL x X1/X2) or rewards")
        ->check(CLI::IsMember({"configs", "rewards"}));

    OracleOptions oo;
    auto* oracle = app.add_subcommand("oracle", "exhaustive search on one scenario");
    add_common(oracle, oracle_o);
    oracle->add_option("--scenario", oo.scenario, "scenario JSON");
    oracle->add_option("--k-active", oo.k_active, "build the scenario from --config with this many FBSs");
    oracle->add_option("--save-scenario", oo.save_scenario, "write the scenario used to this path");
    oracle->add_option("--max-joint", oo.max_joint, "largest joint grid to enumerate");
    oracle->add_option("--step-db", oo.step_db, "grid step (default: config step)");
    oracle->add_option("--search-workers", oo.workers, "threads for the search (0 = all cores)");

    ComplexityOptions co;
    auto* complexity = app.add_subcommand("complexity", "sample-complexity numbers as JSON");
    complexity->add_option("--rmax", co.rmax)->required();
    complexity->add_option("--beta", co.beta)->required();
    complexity->add_option("--eps", co.eps)->required();
    complexity->add_option("--delta", co.delta)->required();
    complexity->add_option("--states", co.states)->required();
    complexity->add_option("--actions", co.actions)->required();
    complexity->add_option("--t", co.t, "iteration count for the error bound (default: the minimum)");

    SurfaceOptions so;
    auto* surface = app.add_subcommand("reward-surface", "reward over an (r0, rk) grid as CSV");
    add_common(surface, surface_o);
    surface->add_option("--m", so.m, "odd-power exponent parameter");
    surface->add_option("--bias", so.bias, "constant bias");
    surface->add_option("--r0-max", so.r0_max);
    surface->add_option("--rk-max", so.rk_max);
    surface->add_option("--distance", so.dist, "FBS-to-MUE distance for the proximity reward");
    surface->add_option("--points", so.n, "grid points per axis");
    surface->add_option("--file", so.file, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (train->parsed()) return cmd_train(train_o);
        if (sweep->parsed()) return cmd_sweep(sweep_o, axis);
        if (oracle->parsed()) return cmd_oracle(oracle_o, oo);
        if (complexity->parsed()) return cmd_complexity(co);
        if (surface->parsed()) return cmd_surface(surface_o, so);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
