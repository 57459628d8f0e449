#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <span>
#include <thread>
#include <vector>

#include "qdpa/channel.hpp"
#include "qdpa/common.hpp"
#include "qdpa/learning.hpp"
#include "qdpa/mdp.hpp"

namespace qdpa {

// ---------------------------------------------------------------------------
// Explicit finite MDPs and dynamic-programming oracles.

struct ExplicitMdp {
    std::size_t states = 0;
    std::size_t actions = 0;
    std::vector<double> transition; // [s][a][s'], row-major
    std::vector<double> reward;     // [s][a]

    double prob(std::size_t s, std::size_t a, std::size_t s2) const
    {
        return transition[(s * actions + a) * states + s2];
    }
    double r(std::size_t s, std::size_t a) const { return reward[s * actions + a]; }

    double reward_bound() const
    {
        double m = 0.0;
        for (double v : reward) m = std::max(m, std::abs(v));
        return m;
    }

    ExplicitMdp with_bias(double c) const
    {
        ExplicitMdp out = *this;
        for (double& v : out.reward) v += c;
        return out;
    }
};

inline void validate(const ExplicitMdp& mdp)
{
    require(mdp.states > 0 && mdp.actions > 0, "ExplicitMdp: empty state or action set");
    require(mdp.transition.size() == mdp.states * mdp.actions * mdp.states, "ExplicitMdp: transition shape");
    require(mdp.reward.size() == mdp.states * mdp.actions, "ExplicitMdp: reward shape");
    for (std::size_t s = 0; s < mdp.states; ++s) {
        for (std::size_t a = 0; a < mdp.actions; ++a) {
            double total = 0.0;
            for (std::size_t s2 = 0; s2 < mdp.states; ++s2) {
                const double p = mdp.prob(s, a, s2);
                require(p >= 0.0, "ExplicitMdp: negative probability");
                total += p;
            }
            require(std::abs(total - 1.0) < 1e-9, "ExplicitMdp: transition row does not sum to 1");
        }
    }
}

/// (T Q)(s,a) = R(s,a) + beta * sum_s' P(s'|s,a) max_b Q(s',b)
inline QTable bellman_optimality(const ExplicitMdp& mdp, const QTable& q, double beta)
{
    std::vector<double> v(mdp.states);
    for (std::size_t s = 0; s < mdp.states; ++s) v[s] = target_il(q, s);
    QTable out(mdp.states, mdp.actions);
    for (std::size_t s = 0; s < mdp.states; ++s) {
        for (std::size_t a = 0; a < mdp.actions; ++a) {
            double expect = 0.0;
            for (std::size_t s2 = 0; s2 < mdp.states; ++s2) expect += mdp.prob(s, a, s2) * v[s2];
            out.set_value(s, a, mdp.r(s, a) + beta * expect);
        }
    }
    return out;
}

inline double sup_distance(const QTable& a, const QTable& b)
{
    require(a.states() == b.states() && a.actions() == b.actions(), "sup_distance: shape mismatch");
    double d = 0.0;
    for (std::size_t s = 0; s < a.states(); ++s)
        for (std::size_t x = 0; x < a.actions(); ++x) d = std::max(d, std::abs(a.value(s, x) - b.value(s, x)));
    return d;
}

/// Iterates the optimality operator until successive iterates differ by less
/// than tol in sup norm.
inline QTable value_iteration(const ExplicitMdp& mdp, double beta, double tol, std::size_t max_iter = 1'000'000)
{
    validate(mdp);
    require(beta > 0.0 && beta < 1.0, "value_iteration: beta must be in (0, 1)");
    require(tol > 0.0, "value_iteration: tolerance must be positive");
    QTable q(mdp.states, mdp.actions);
    for (std::size_t it = 0; it < max_iter; ++it) {
        QTable next = bellman_optimality(mdp, q, beta);
        const double delta = sup_distance(next, q);
        q = std::move(next);
        if (delta < tol) return q;
    }
    throw invalid_input("value_iteration: did not converge within max_iter");
}

/// V = R_pi + beta P_pi V for a deterministic policy, by fixed-point iteration.
inline std::vector<double> policy_evaluation(const ExplicitMdp& mdp, std::span<const std::size_t> policy, double beta,
                                             double tol = 1e-12, std::size_t max_iter = 10'000'000)
{
    validate(mdp);
    require(beta > 0.0 && beta < 1.0, "policy_evaluation: beta must be in (0, 1)");
    require(policy.size() == mdp.states, "policy_evaluation: policy size mismatch");
    for (std::size_t a : policy) require(a < mdp.actions, "policy_evaluation: action out of range");
    std::vector<double> v(mdp.states, 0.0), next(mdp.states);
    for (std::size_t it = 0; it < max_iter; ++it) {
        double delta = 0.0;
        for (std::size_t s = 0; s < mdp.states; ++s) {
            const std::size_t a = policy[s];
            double expect = 0.0;
            for (std::size_t s2 = 0; s2 < mdp.states; ++s2) expect += mdp.prob(s, a, s2) * v[s2];
            next[s] = mdp.r(s, a) + beta * expect;
            delta = std::max(delta, std::abs(next[s] - v[s]));
        }
        v.swap(next);
        if (delta < tol) return v;
    }
    throw invalid_input("policy_evaluation: did not converge within max_iter");
}

// ---------------------------------------------------------------------------
// Power-allocation baselines.

/// Every active FBS at the top of the grid.
inline std::vector<double> greedy_powers(int k_active, const ActionSet& actions)
{
    require(k_active >= 0, "greedy_powers: negative agent count");
    return std::vector<double>(static_cast<std::size_t>(k_active), actions.max_power());
}

struct FeasibilityReport {
    bool feasible = false;
    double mue_slack = 0.0;          // gamma0 - Gamma0
    std::vector<double> fue_slacks;  // gamma_k - Gamma_k

    /// Smallest slack relative to its threshold; >= 0 iff feasible.
    double min_relative_slack(const Network& net) const
    {
        double m = mue_slack / net.gamma0_threshold;
        for (double s : fue_slacks) m = std::min(m, s / net.gammak_threshold);
        return m;
    }
};

inline FeasibilityReport check_feasible(const Network& net, std::span<const double> powers)
{
    const LinkReport links = evaluate_links(net, powers);
    FeasibilityReport rep;
    rep.mue_slack = links.gamma0 - net.gamma0_threshold;
    rep.feasible = rep.mue_slack >= 0.0;
    rep.fue_slacks.resize(powers.size());
    for (std::size_t k = 0; k < powers.size(); ++k) {
        rep.fue_slacks[k] = links.gammas[k] - net.gammak_threshold;
        rep.feasible = rep.feasible && rep.fue_slacks[k] >= 0.0;
    }
    return rep;
}

struct SolveResult {
    std::vector<double> best_powers;
    std::vector<std::size_t> best_actions;
    double objective = 0.0; // sum of FUE rates at best_powers
    bool feasible = false;
    std::uint64_t evaluated_count = 0;
    double min_relative_slack = 0.0; // of best_powers; the fallback criterion when infeasible
};

class BudgetExceeded : public invalid_input {
public:
    using invalid_input::invalid_input;
};

namespace detail {

struct SearchBest {
    bool have_feasible = false;
    std::uint64_t feasible_index = 0;
    double feasible_objective = -std::numeric_limits<double>::infinity();
    std::uint64_t fallback_index = 0;
    double fallback_slack = -std::numeric_limits<double>::infinity();
    std::uint64_t count = 0;
};

inline void decode_joint(std::uint64_t index, std::size_t levels, std::span<std::size_t> digits)
{
    // agent 1 is the most significant digit, giving lexicographic order
    for (std::size_t i = digits.size(); i-- > 0;) {
        digits[i] = index % levels;
        index /= levels;
    }
}

inline SearchBest search_range(const Network& net, const ActionSet& actions, std::uint64_t begin, std::uint64_t end)
{
    const std::size_t k = net.femto_count();
    std::vector<std::size_t> digits(k);
    std::vector<double> p(k);
    SearchBest best;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
        decode_joint(idx, actions.size(), digits);
        for (std::size_t i = 0; i < k; ++i) p[i] = actions.levels_w[digits[i]];
        const FeasibilityReport f = check_feasible(net, p);
        ++best.count;
        if (f.feasible) {
            double obj = 0.0;
            for (std::size_t i = 1; i <= k; ++i) obj += rate(sinr_fue(i, net.mbs_power_w, p, net.channel, net.noise_w));
            if (!best.have_feasible || obj > best.feasible_objective) {
                best.have_feasible = true;
                best.feasible_objective = obj;
                best.feasible_index = idx;
            }
        } else if (!best.have_feasible) {
            const double slack = f.min_relative_slack(net);
            if (slack > best.fallback_slack) {
                best.fallback_slack = slack;
                best.fallback_index = idx;
            }
        }
    }
    return best;
}

/// Associative merge; `a` covers lower indices than `b`.
inline SearchBest merge(const SearchBest& a, const SearchBest& b)
{
    SearchBest out = a;
    out.count = a.count + b.count;
    if (b.have_feasible && (!a.have_feasible || b.feasible_objective > a.feasible_objective)) {
        out.have_feasible = true;
        out.feasible_objective = b.feasible_objective;
        out.feasible_index = b.feasible_index;
    }
    if (b.fallback_slack > a.fallback_slack) {
        out.fallback_slack = b.fallback_slack;
        out.fallback_index = b.fallback_index;
    }
    return out;
}

} // namespace detail

inline constexpr std::uint64_t kDefaultJointBudget = 10'000'000;

/// Joint grid size |A|^K, saturating at the uint64 maximum.
inline std::uint64_t joint_grid_size(std::size_t levels, std::size_t agents)
{
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < agents; ++i) {
        if (total > std::numeric_limits<std::uint64_t>::max() / levels) return std::numeric_limits<std::uint64_t>::max();
        total *= levels;
    }
    return total;
}

/**
 * Enumerates every joint power vector on the grid and returns the feasible
 * vector with the largest FUE sum rate (lexicographically first on ties).
 * When nothing is feasible, returns feasible=false with the vector that
 * maximizes the smallest relative constraint slack.
 *
 * Throws BudgetExceeded instead of subsampling when |A|^K > max_joint.
 */
inline SolveResult exhaustive_search(const Network& net, const ActionSet& actions,
                                     std::uint64_t max_joint = kDefaultJointBudget, unsigned workers = 0)
{
    require(actions.size() > 0, "exhaustive_search: empty action set");
    const std::size_t k = net.femto_count();
    const std::uint64_t total = joint_grid_size(actions.size(), k);
    if (total > max_joint) {
        throw BudgetExceeded("exhaustive_search: " + std::to_string(actions.size()) + "^" + std::to_string(k) +
                             " joint vectors exceed the budget of " + std::to_string(max_joint));
    }

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    if (total < 4096) workers = 1;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    std::vector<std::future<detail::SearchBest>> parts;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t b = std::min(total, chunk * w);
        const std::uint64_t e = std::min(total, b + chunk);
        parts.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async,
                                   [&net, &actions, b, e] { return detail::search_range(net, actions, b, e); }));
    }
    detail::SearchBest best = parts.front().get();
    for (std::size_t i = 1; i < parts.size(); ++i) best = detail::merge(best, parts[i].get());

    SolveResult res;
    res.evaluated_count = best.count;
    res.feasible = best.have_feasible;
    const std::uint64_t idx = best.have_feasible ? best.feasible_index : best.fallback_index;
    res.best_actions.resize(k);
    detail::decode_joint(idx, actions.size(), res.best_actions);
    res.best_powers.resize(k);
    for (std::size_t i = 0; i < k; ++i) res.best_powers[i] = actions.levels_w[res.best_actions[i]];
    const LinkReport links = evaluate_links(net, res.best_powers);
    res.objective = links.fue_sum_rate();
    res.min_relative_slack = check_feasible(net, res.best_powers).min_relative_slack(net);
    return res;
}

} // namespace qdpa
