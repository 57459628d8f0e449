#pragma once

// Tabular Q-learning with per-cell visit counts, the 1/(1+t) learning rate,
// e-greedy exploration and the independent / cooperative targets of the
// factored multi-agent update.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qdpa/common.hpp"

namespace qdpa {

class QTable {
public:
    QTable() = default;
    QTable(std::size_t states, std::size_t actions)
        : states_(states), actions_(actions), values_(states * actions, 0.0), visits_(states * actions, 0)
    {
        require(states > 0 && actions > 0, "QTable: empty shape");
    }

    std::size_t states() const { return states_; }
    std::size_t actions() const { return actions_; }

    double value(std::size_t s, std::size_t a) const { return values_[at(s, a)]; }
    void set_value(std::size_t s, std::size_t a, double v) { values_[at(s, a)] = v; }
    std::uint64_t visits(std::size_t s, std::size_t a) const { return visits_[at(s, a)]; }
    void set_visits(std::size_t s, std::size_t a, std::uint64_t n) { visits_[at(s, a)] = n; }
    void add_visit(std::size_t s, std::size_t a) { ++visits_[at(s, a)]; }

    std::span<const double> row(std::size_t s) const
    {
        require(s < states_, "QTable: state out of range");
        return {values_.data() + s * actions_, actions_};
    }

    /// max |Q(s, a)| over the table.
    double sup_norm() const
    {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    bool operator==(const QTable&) const = default;

private:
    std::size_t at(std::size_t s, std::size_t a) const
    {
        require(s < states_ && a < actions_, "QTable: index out of range");
        return s * actions_ + a;
    }

    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> values_;
    std::vector<std::uint64_t> visits_;
};

enum class LearningMode { Independent, Cooperative };

inline std::string to_string(LearningMode m) { return m == LearningMode::Independent ? "IL" : "CL"; }

inline LearningMode learning_mode_from_string(const std::string& s)
{
    if (s == "IL" || s == "independent") return LearningMode::Independent;
    if (s == "CL" || s == "cooperative") return LearningMode::Cooperative;
    throw invalid_input("unknown learning mode '" + s + "'");
}

struct LearningConfig {
    double beta = 0.9;
    double epsilon_explore = 0.10;
    LearningMode mode = LearningMode::Independent;
    std::uint64_t training_frames = 2000;
    std::uint64_t rng_seed = 0;

    bool operator==(const LearningConfig&) const = default;
};

inline void validate(const LearningConfig& c)
{
    require(c.beta > 0.0 && c.beta <= 1.0, "LearningConfig: beta must be in (0, 1]");
    require(c.epsilon_explore >= 0.0 && c.epsilon_explore <= 1.0, "LearningConfig: epsilon must be in [0, 1]");
}

inline double learning_rate(std::uint64_t visit_count) { return 1.0 / (1.0 + static_cast<double>(visit_count)); }

/// Index of the largest entry, lowest index on ties.
inline std::size_t argmax(std::span<const double> v)
{
    require(!v.empty(), "argmax: empty row");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

inline double target_il(const QTable& q, std::size_t next_state)
{
    const auto row = q.row(next_state);
    return row[argmax(row)];
}

struct CooperativeTarget {
    double value = 0.0;     // max_a sum_k Q_k(x', a)
    std::size_t action = 0; // its argmax
};

/// Cooperative target over the agents that share next_state.
inline CooperativeTarget target_cl(std::span<const QTable* const> same_state, std::size_t next_state)
{
    require(!same_state.empty(), "target_cl: no agents share the state");
    const std::size_t n_actions = same_state.front()->actions();
    std::vector<double> summed(n_actions, 0.0);
    for (const QTable* q : same_state) {
        require(q->actions() == n_actions && q->states() == same_state.front()->states(),
                "target_cl: Q-tables differ in shape");
        const auto row = q->row(next_state);
        for (std::size_t a = 0; a < n_actions; ++a) summed[a] += row[a];
    }
    const std::size_t best = argmax(summed);
    return {summed[best], best};
}

/// Q(s,a) <- Q(s,a) + alpha (reward + beta * target - Q(s,a)), alpha from the
/// visit count before this update. Returns the new value.
inline double q_update(QTable& q, std::size_t s, std::size_t a, double reward, double target_value, double beta)
{
    const double alpha = learning_rate(q.visits(s, a));
    const double old = q.value(s, a);
    const double updated = old + alpha * (reward + beta * target_value - old);
    q.set_value(s, a, updated);
    q.add_visit(s, a);
    return updated;
}

/// Greedy action for an agent. Cooperative mode sums the rows of every
/// agent in `same_state` (which includes the agent itself).
inline std::size_t greedy_action(const QTable& own, std::span<const QTable* const> same_state, std::size_t state,
                                 LearningMode mode)
{
    if (mode == LearningMode::Independent || same_state.empty()) {
        return argmax(own.row(state));
    }
    return target_cl(same_state, state).action;
}

template <typename Rng>
std::size_t select_action(const QTable& own, std::span<const QTable* const> same_state, std::size_t state,
                          double epsilon_explore, LearningMode mode, Rng& rng)
{
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (epsilon_explore > 0.0 && coin(rng) < epsilon_explore) {
        std::uniform_int_distribution<std::size_t> pick(0, own.actions() - 1);
        return pick(rng);
    }
    return greedy_action(own, same_state, state, mode);
}

/// Mean of the empirical Bellman targets seen by one (s, a) cell. Under
/// zero initialization and alpha = 1/(1+t) this equals the cell's value.
inline double lemma1_average_identity(std::span<const double> targets)
{
    require(!targets.empty(), "lemma1_average_identity: empty target history");
    double sum = 0.0;
    for (double t : targets) sum += t;
    return sum / static_cast<double>(targets.size());
}

/// V_max = R_max / (1 - beta), the uniform bound on zero-initialized Q.
inline double value_bound(double r_max, double beta)
{
    require(beta < 1.0, "value_bound: beta must be < 1");
    return r_max / (1.0 - beta);
}

} // namespace qdpa
