#pragma once

// Incremental-deployment experiment: FBSs join one at a time, each trains
// its Q-table for a fixed frame budget while the already trained FBSs act
// greedily, then the whole network is measured with every agent greedy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qdpa/baselines.hpp"
#include "qdpa/channel.hpp"
#include "qdpa/complexity.hpp"
#include "qdpa/learning.hpp"
#include "qdpa/mdp.hpp"
#include "qdpa/reward.hpp"
#include "qdpa/stats.hpp"
#include "qdpa/topology.hpp"

namespace qdpa {

struct BaselineFlags {
    bool greedy = true;
    bool exhaustive = false;
    std::uint64_t exhaustive_budget = kDefaultJointBudget;
    double exhaustive_step_db = 0.0; // 0: use the learning grid

    bool operator==(const BaselineFlags&) const = default;
};

struct TheoryTargets {
    double optimality = 0.9; // epsilon = (1 - optimality) * V_max
    double delta = 0.1;

    bool operator==(const TheoryTargets&) const = default;
};

inline std::vector<std::uint64_t> default_seeds(std::size_t n = 20)
{
    std::vector<std::uint64_t> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = i + 1;
    return s;
}

struct RunConfig {
    ScenarioConfig scenario;
    LearningConfig learning;
    StateSetModel state_model = StateSetModel::X1X3X4;
    RewardSpec reward;
    int k_max = 10;
    std::vector<std::uint64_t> seeds = default_seeds();
    BaselineFlags baselines;
    std::string output_dir = "out";
    double frame_time_ms = 2.0;
    TheoryTargets theory;
    unsigned workers = 0; // seeds run in parallel; 0 = hardware concurrency

    bool operator==(const RunConfig&) const = default;
};

inline void validate(const RunConfig& cfg)
{
    validate(cfg.scenario);
    validate(cfg.learning);
    validate(cfg.reward);
    require(!cfg.seeds.empty(), "RunConfig: at least one seed is required");
    require(cfg.k_max >= 1 && cfg.k_max <= cfg.scenario.apartment_count(),
            "RunConfig: k_max must be between 1 and the number of apartments");
    require(cfg.learning.training_frames >= 1, "RunConfig: training_frames must be >= 1");
    require(cfg.theory.optimality > 0.0 && cfg.theory.optimality < 1.0, "RunConfig: optimality must be in (0, 1)");
    require(cfg.theory.delta > 0.0 && cfg.theory.delta <= 1.0, "RunConfig: delta must be in (0, 1]");
}

struct MetricsRecord {
    std::uint64_t seed = 0;
    int k_active = 0;
    std::string method;      // qdpa | greedy | exhaustive | exhaustive-fallback
    std::string state_model;
    std::string reward_kind;
    double mue_rate = 0.0;
    double fue_sum_rate = 0.0;
    double fbs_sum_power_mw = 0.0;
    bool mue_ok = false;
    double fue_ok_frac = 0.0;
    std::uint64_t cl_messages = 0;
    std::vector<double> powers_w; // agent k at index k-1

    bool operator==(const MetricsRecord&) const = default;
};

inline MetricsRecord make_record(const Network& net, std::span<const double> powers, std::uint64_t seed,
                                 std::string method, const RunConfig& cfg)
{
    const LinkReport links = evaluate_links(net, powers);
    MetricsRecord r;
    r.seed = seed;
    r.k_active = static_cast<int>(powers.size());
    r.method = std::move(method);
    r.state_model = to_string(cfg.state_model);
    r.reward_kind = to_string(cfg.reward.kind);
    r.mue_rate = links.r0;
    r.fue_sum_rate = links.fue_sum_rate();
    r.powers_w.assign(powers.begin(), powers.end());
    for (double p : powers) r.fbs_sum_power_mw += p * 1e3;
    r.mue_ok = links.gamma0 >= net.gamma0_threshold;
    std::size_t ok = 0;
    for (double g : links.gammas) ok += g >= net.gammak_threshold ? 1 : 0;
    r.fue_ok_frac = powers.empty() ? 1.0 : static_cast<double>(ok) / static_cast<double>(powers.size());
    return r;
}

struct TrainingTrace {
    std::vector<double> rewards;
    std::vector<std::size_t> actions;
    std::uint64_t cl_messages = 0;
};

/// Mutable state of one replica: the active FBSs, their Q-tables and the
/// state each agent observed at the end of the last frame.
class Deployment {
public:
    Deployment(const RunConfig& cfg, std::uint64_t seed)
        : cfg_(cfg), seed_(seed), actions_(action_set(cfg.scenario)),
          space_(state_space(cfg.scenario, cfg.state_model))
    {
        validate(cfg_);
        cfg_.scenario.seed = seed;
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(cfg.learning.rng_seed),
                          static_cast<std::uint32_t>(cfg.learning.rng_seed >> 32)};
        rng_.seed(seq);
    }

    int active() const { return scenario_.k_active; }
    const Scenario& scenario() const { return scenario_; }
    const Network& network() const { return net_; }
    const ActionSet& actions() const { return actions_; }
    const StateSpace& space() const { return space_; }
    const std::vector<QTable>& tables() const { return tables_; }
    const std::vector<std::size_t>& states() const { return states_; }
    const std::vector<std::size_t>& last_actions() const { return last_actions_; }
    const RunConfig& config() const { return cfg_; }
    std::uint64_t seed() const { return seed_; }

    /// Switches on the next FBS. It starts silent, so its first observed
    /// state reflects the network before it transmits.
    void activate_next()
    {
        const int k = active() + 1;
        scenario_ = build_scenario(cfg_.scenario, k);
        net_ = scenario_.network();
        tables_.emplace_back(space_.size(), actions_.size());
        std::vector<double> p = powers_of(last_actions_);
        p.push_back(0.0);
        const LinkReport links = evaluate_links(net_, p);
        states_ = observe_all(links);
        last_actions_.push_back(0);
        rings_.clear();
        for (std::size_t s : states_) {
            const AgentState st = space_.state(s);
            rings_.emplace_back(st.x3, st.x4);
        }
        const double r_max = reward_bound(scenario_, cfg_.reward);
        v_max_ = cfg_.learning.beta < 1.0 ? value_bound(r_max, cfg_.learning.beta) : -1.0;
    }

    /// Greedy choice of agent k (0-based) given the current states.
    std::size_t greedy(std::size_t k) const
    {
        const auto peers = same_state_tables(states_[k]);
        return greedy_action(tables_[k], peers, states_[k], cfg_.learning.mode);
    }

    /// Trains the newest FBS for the configured frame budget.
    TrainingTrace train_newest()
    {
        require(active() >= 1, "train_newest: no active FBS");
        const std::size_t learner = tables_.size() - 1;
        const std::uint64_t frames = cfg_.learning.training_frames;
        const bool cooperative = cfg_.learning.mode == LearningMode::Cooperative;
        TrainingTrace trace;
        trace.rewards.reserve(frames);
        trace.actions.reserve(frames);

        std::vector<std::size_t> acts(tables_.size());
        for (std::uint64_t f = 0; f < frames; ++f) {
            for (std::size_t k = 0; k < learner; ++k) acts[k] = greedy(k);
            const auto peers = same_state_tables(states_[learner]);
            acts[learner] = select_action(tables_[learner], peers, states_[learner], cfg_.learning.epsilon_explore,
                                          cfg_.learning.mode, rng_);

            const std::vector<double> p = powers_of(acts);
            const LinkReport links = evaluate_links(net_, p);
            const double reward = evaluate_reward(cfg_.reward, reward_inputs(links, learner));
            const std::vector<std::size_t> next = observe_all(links);
            check_rings(next);

            const std::size_t s = states_[learner];
            const std::size_t s2 = next[learner];
            states_ = next;
            double target = 0.0;
            if (cooperative) {
                // a* maximizes the summed rows of the agents now in s2;
                // the learner bootstraps from its own entry at a*
                const auto now_peers = same_state_tables(s2);
                target = tables_[learner].value(s2, target_cl(now_peers, s2).action);
                trace.cl_messages += space_.reachable_rows() * learner;
            } else {
                target = target_il(tables_[learner], s2);
            }
            const double q = q_update(tables_[learner], s, acts[learner], reward, target, cfg_.learning.beta);
            if (v_max_ >= 0.0 && std::abs(q) > v_max_ * (1.0 + 1e-12)) {
                throw std::logic_error("Q-value left the [-V_max, V_max] band during training");
            }
            trace.rewards.push_back(reward);
            trace.actions.push_back(acts[learner]);
        }
        last_actions_ = acts;
        return trace;
    }

    /// One frame with every agent greedy. Advances the observed states.
    std::vector<double> evaluate_greedy()
    {
        std::vector<std::size_t> acts(tables_.size());
        for (std::size_t k = 0; k < acts.size(); ++k) acts[k] = greedy(k);
        const std::vector<double> p = powers_of(acts);
        states_ = observe_all(evaluate_links(net_, p));
        last_actions_ = acts;
        return p;
    }

private:
    std::vector<double> powers_of(const std::vector<std::size_t>& acts) const
    {
        std::vector<double> p(acts.size());
        for (std::size_t i = 0; i < acts.size(); ++i) p[i] = actions_.levels_w[acts[i]];
        return p;
    }

    std::vector<std::size_t> observe_all(const LinkReport& links) const
    {
        std::vector<std::size_t> out(links.gammas.size());
        for (std::size_t k = 0; k < out.size(); ++k) {
            const int agent = static_cast<int>(k) + 1;
            out[k] = space_.index(observe_state(agent, links.gammas[k], links.gamma0, scenario_, cfg_.state_model));
        }
        return out;
    }

    RewardInputs reward_inputs(const LinkReport& links, std::size_t k) const
    {
        return {links.r0, links.rates[k], net_.gamma0_threshold, net_.gammak_threshold,
                scenario_.fbs_mue_distance(static_cast<int>(k) + 1)};
    }

    std::vector<const QTable*> same_state_tables(std::size_t state) const
    {
        std::vector<const QTable*> out;
        for (std::size_t j = 0; j < tables_.size(); ++j) {
            if (states_[j] == state) out.push_back(&tables_[j]);
        }
        return out;
    }

    void check_rings(const std::vector<std::size_t>& next) const
    {
        for (std::size_t k = 0; k < next.size(); ++k) {
            const AgentState st = space_.state(next[k]);
            if (std::pair{st.x3, st.x4} != rings_[k]) {
                throw std::logic_error("ring state variables changed under static geometry");
            }
        }
    }

    RunConfig cfg_;
    std::uint64_t seed_;
    ActionSet actions_;
    StateSpace space_;
    Scenario scenario_{};
    Network net_{};
    std::vector<QTable> tables_;
    std::vector<std::size_t> states_;
    std::vector<std::size_t> last_actions_;
    std::vector<std::pair<int, int>> rings_;
    double v_max_ = -1.0;
    std::mt19937_64 rng_;
};

/// Activates FBS new_k (must be the next one) and trains it.
inline TrainingTrace train_one_fbs(Deployment& dep, int new_k)
{
    require(new_k == dep.active() + 1, "train_one_fbs: FBSs join in order");
    dep.activate_next();
    return dep.train_newest();
}

struct TheoryReport {
    double r_max = 0.0;
    double v_max = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::uint64_t t_iterations = 0;
    std::uint64_t l_theoretical = 0;
    std::uint64_t l_practical = 0;
    double practical_seconds_per_fbs = 0.0;
    double theoretical_seconds_per_fbs = 0.0;
};

/// Sample-complexity numbers for the configured defaults, using the reward
/// bound of the full k_max deployment of the first seed.
inline TheoryReport theory_report(const RunConfig& cfg)
{
    ScenarioConfig sc = cfg.scenario;
    sc.seed = cfg.seeds.front();
    const Scenario s = build_scenario(sc, cfg.k_max);
    const StateSpace space = state_space(cfg.scenario, cfg.state_model);
    const ActionSet acts = action_set(cfg.scenario);
    TheoryReport t;
    t.r_max = reward_bound(s, cfg.reward);
    t.delta = cfg.theory.delta;
    t.l_practical = cfg.learning.training_frames;
    t.practical_seconds_per_fbs = static_cast<double>(t.l_practical) * cfg.frame_time_ms * 1e-3;
    if (cfg.learning.beta < 1.0 && t.r_max > 0.0) {
        t.v_max = value_bound(t.r_max, cfg.learning.beta);
        t.epsilon = (1.0 - cfg.theory.optimality) * t.v_max;
        t.t_iterations = min_iterations(t.r_max, cfg.learning.beta, t.epsilon, t.delta,
                                        static_cast<double>(space.size()), static_cast<double>(acts.size()));
        t.l_theoretical = training_length(t.t_iterations, space.size(), acts.size());
        t.theoretical_seconds_per_fbs = static_cast<double>(t.l_theoretical) * cfg.frame_time_ms * 1e-3;
    }
    return t;
}

struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<MetricsRecord> records;
    std::vector<QTable> tables; // final tables, agent k at index k-1
    std::vector<std::string> warnings;
};

struct RunResult {
    std::vector<MetricsRecord> records; // seed-major, then K, then method
    std::vector<SeedRun> seeds;
    TheoryReport theory;
};

inline ActionSet exhaustive_grid(const RunConfig& cfg)
{
    const double step = cfg.baselines.exhaustive_step_db > 0.0 ? cfg.baselines.exhaustive_step_db
                                                                : cfg.scenario.fbs_step_db;
    return action_set(cfg.scenario.fbs_pmin_dbm, cfg.scenario.fbs_pmax_dbm, step);
}

/// Full protocol for one seed.
inline SeedRun run_seed(const RunConfig& cfg, std::uint64_t seed)
{
    SeedRun out;
    out.seed = seed;
    Deployment dep(cfg, seed);
    const ActionSet grid = cfg.baselines.exhaustive ? exhaustive_grid(cfg) : ActionSet{};
    for (int k = 1; k <= cfg.k_max; ++k) {
        const TrainingTrace trace = train_one_fbs(dep, k);
        const std::vector<double> p = dep.evaluate_greedy();
        MetricsRecord rec = make_record(dep.network(), p, seed, "qdpa", cfg);
        rec.cl_messages = trace.cl_messages;
        out.records.push_back(std::move(rec));

        if (cfg.baselines.greedy) {
            const std::vector<double> g = greedy_powers(k, dep.actions());
            out.records.push_back(make_record(dep.network(), g, seed, "greedy", cfg));
        }
        if (cfg.baselines.exhaustive) {
            try {
                const SolveResult sol = exhaustive_search(dep.network(), grid, cfg.baselines.exhaustive_budget, 1);
                out.records.push_back(make_record(dep.network(), sol.best_powers, seed,
                                                  sol.feasible ? "exhaustive" : "exhaustive-fallback", cfg));
            } catch (const BudgetExceeded& e) {
                out.warnings.push_back("seed " + std::to_string(seed) + ", K=" + std::to_string(k) +
                                       ": exhaustive baseline skipped (" + e.what() + ")");
            }
        }
    }
    out.tables = dep.tables();
    return out;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads; results keep index order.
template <typename F>
auto parallel_map(std::size_t n, unsigned workers, F fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using R = decltype(fn(std::size_t{}));
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<R> out;
    out.reserve(n);
    for (std::size_t begin = 0; begin < n; begin += workers) {
        const std::size_t end = std::min(n, begin + workers);
        std::vector<std::future<R>> batch;
        for (std::size_t i = begin; i < end; ++i) {
            batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async, fn, i));
        }
        for (auto& f : batch) out.push_back(f.get());
    }
    return out;
}

/// One record per K and method for every seed. Seeds are independent
/// replicas and run concurrently.
inline RunResult run_incremental(const RunConfig& cfg)
{
    validate(cfg);
    RunResult res;
    res.theory = theory_report(cfg);
    res.seeds = parallel_map(cfg.seeds.size(), cfg.workers, [&cfg](std::size_t i) { return run_seed(cfg, cfg.seeds[i]); });
    for (const SeedRun& s : res.seeds) {
        res.records.insert(res.records.end(), s.records.begin(), s.records.end());
    }
    return res;
}

// ---------------------------------------------------------------------------
// Aggregation and configuration comparison.

struct SeriesPoint {
    std::string method;
    int k_active = 0;
    std::size_t n = 0;
    double mue_rate_mean = 0.0, mue_rate_ci95 = 0.0;
    double fue_sum_rate_mean = 0.0, fue_sum_rate_ci95 = 0.0;
    double fbs_sum_power_mw_mean = 0.0, fbs_sum_power_mw_ci95 = 0.0;
    double mue_ok_frac = 0.0;
};

/// Seed-averaged metrics per (method, K).
inline std::vector<SeriesPoint> aggregate(const std::vector<MetricsRecord>& records)
{
    std::map<std::pair<std::string, int>, std::vector<const MetricsRecord*>> groups;
    for (const auto& r : records) groups[{r.method, r.k_active}].push_back(&r);
    std::vector<SeriesPoint> out;
    for (const auto& [key, recs] : groups) {
        std::vector<double> r0, rk, pw;
        double ok = 0.0;
        for (const auto* r : recs) {
            r0.push_back(r->mue_rate);
            rk.push_back(r->fue_sum_rate);
            pw.push_back(r->fbs_sum_power_mw);
            ok += r->mue_ok ? 1.0 : 0.0;
        }
        SeriesPoint p;
        p.method = key.first;
        p.k_active = key.second;
        p.n = recs.size();
        p.mue_rate_mean = stats::mean(r0);
        p.mue_rate_ci95 = stats::ci95_halfwidth(r0);
        p.fue_sum_rate_mean = stats::mean(rk);
        p.fue_sum_rate_ci95 = stats::ci95_halfwidth(rk);
        p.fbs_sum_power_mw_mean = stats::mean(pw);
        p.fbs_sum_power_mw_ci95 = stats::ci95_halfwidth(pw);
        p.mue_ok_frac = ok / static_cast<double>(recs.size());
        out.push_back(p);
    }
    return out;
}

/// Values of one method's metric at one K, ordered by seed.
inline std::vector<double> metric_at(const std::vector<MetricsRecord>& records, const std::string& method, int k,
                                     const std::function<double(const MetricsRecord&)>& field)
{
    std::vector<const MetricsRecord*> sel;
    for (const auto& r : records) {
        if (r.method == method && r.k_active == k) sel.push_back(&r);
    }
    std::sort(sel.begin(), sel.end(), [](auto* a, auto* b) { return a->seed < b->seed; });
    std::vector<double> out;
    for (const auto* r : sel) out.push_back(field(*r));
    return out;
}

struct LabeledRun {
    std::string label;
    RunConfig config;
    RunResult result;
};

struct RankRow {
    std::string label;
    double sum_power_mw = 0.0;
    double sum_rate = 0.0;
    double mue_rate = 0.0;
    int rank_power = 0; // 1 = least power
    int rank_sum_rate = 0;
    int rank_mue_rate = 0;
};

struct Comparison {
    std::vector<LabeledRun> runs;
    int k_eval = 0;
    std::vector<RankRow> ranking;
};

/// Competition ranking ("1224"): equal values share the better rank.
inline std::vector<int> competition_ranks(const std::vector<double>& values, bool higher_is_better)
{
    std::vector<int> ranks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        int better = 0;
        for (double v : values) {
            if (higher_is_better ? v > values[i] : v < values[i]) ++better;
        }
        ranks[i] = better + 1;
    }
    return ranks;
}

inline std::vector<RankRow> rank_runs(const std::vector<LabeledRun>& runs, int k)
{
    std::vector<RankRow> rows;
    std::vector<double> pw, rk, r0;
    for (const auto& run : runs) {
        RankRow row;
        row.label = run.label;
        row.sum_power_mw = stats::mean(metric_at(run.result.records, "qdpa", k,
                                                 [](const MetricsRecord& r) { return r.fbs_sum_power_mw; }));
        row.sum_rate = stats::mean(metric_at(run.result.records, "qdpa", k,
                                             [](const MetricsRecord& r) { return r.fue_sum_rate; }));
        row.mue_rate = stats::mean(metric_at(run.result.records, "qdpa", k,
                                             [](const MetricsRecord& r) { return r.mue_rate; }));
        pw.push_back(row.sum_power_mw);
        rk.push_back(row.sum_rate);
        r0.push_back(row.mue_rate);
        rows.push_back(row);
    }
    const auto rp = competition_ranks(pw, false);
    const auto rr = competition_ranks(rk, true);
    const auto r0r = competition_ranks(r0, true);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].rank_power = rp[i];
        rows[i].rank_sum_rate = rr[i];
        rows[i].rank_mue_rate = r0r[i];
    }
    return rows;
}

/// Runs each labeled variant on the same seeds and ranks them at k_max.
inline Comparison sweep(std::vector<std::pair<std::string, RunConfig>> variants)
{
    Comparison c;
    for (auto& [label, cfg] : variants) {
        LabeledRun run{label, cfg, run_incremental(cfg)};
        c.k_eval = cfg.k_max;
        c.runs.push_back(std::move(run));
    }
    c.ranking = rank_runs(c.runs, c.k_eval);
    return c;
}

/// IL+X1, CL+X1, IL+X2, CL+X2 on identical scenarios and seeds.
inline Comparison compare_configurations(const RunConfig& base)
{
    std::vector<std::pair<std::string, RunConfig>> variants;
    for (StateSetModel model : {StateSetModel::X1X3X4, StateSetModel::X2X3X4}) {
        for (LearningMode mode : {LearningMode::Independent, LearningMode::Cooperative}) {
            RunConfig cfg = base;
            cfg.state_model = model;
            cfg.learning.mode = mode;
            variants.emplace_back(to_string(mode) + "+" + to_string(model), cfg);
        }
    }
    // table order: IL+X1, CL+X1, IL+X2, CL+X2
    return sweep(std::move(variants));
}

/// The same learning configuration under each reward kind.
inline Comparison compare_rewards(const RunConfig& base, const std::vector<RewardKind>& kinds)
{
    std::vector<std::pair<std::string, RunConfig>> variants;
    for (RewardKind kind : kinds) {
        RunConfig cfg = base;
        cfg.reward.kind = kind;
        variants.emplace_back(to_string(kind), cfg);
    }
    return sweep(std::move(variants));
}

} // namespace qdpa
