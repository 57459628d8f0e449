#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qdpa/common.hpp"
#include "qdpa/topology.hpp"

namespace qdpa {

/// Which state variables an agent observes.
///   X1X3X4: FUE QoS bit + MUE ring + MBS ring
///   X2X3X4: MUE QoS bit + MUE ring + MBS ring
///   Full:   both QoS bits + both rings
enum class StateSetModel { X1X3X4, X2X3X4, Full };

inline std::string to_string(StateSetModel m)
{
    switch (m) {
    case StateSetModel::X1X3X4: return "X1";
    case StateSetModel::X2X3X4: return "X2";
    case StateSetModel::Full: return "Full";
    }
    return "unknown";
}

inline StateSetModel state_model_from_string(const std::string& s)
{
    if (s == "X1" || s == "X1X3X4") return StateSetModel::X1X3X4;
    if (s == "X2" || s == "X2X3X4") return StateSetModel::X2X3X4;
    if (s == "Full" || s == "full") return StateSetModel::Full;
    throw invalid_input("unknown state model '" + s + "'");
}

/// Number of QoS indicator bits the model keeps.
inline int indicator_bits(StateSetModel m) { return m == StateSetModel::Full ? 2 : 1; }

inline std::size_t state_space_size(StateSetModel model, int n1, int n2)
{
    require(n1 >= 1 && n2 >= 1, "state_space_size: ring counts must be >= 1");
    return (std::size_t{1} << indicator_bits(model)) * static_cast<std::size_t>(n1 + 1) *
           static_cast<std::size_t>(n2 + 1);
}

struct AgentState {
    int x1 = 0; // FUE meets its SINR threshold
    int x2 = 0; // MUE meets its SINR threshold
    int x3 = 0; // ring around the MUE, 0..N1
    int x4 = 0; // ring around the MBS, 0..N2
    StateSetModel model = StateSetModel::X1X3X4;

    bool operator==(const AgentState&) const = default;
};

/// Bijection between AgentState and {0..|X|-1} for a model and ring counts.
/// Fields not in the model are ignored when indexing and zero when decoding.
class StateSpace {
public:
    StateSpace(StateSetModel model, int n1, int n2) : model_(model), n1_(n1), n2_(n2)
    {
        require(n1 >= 1 && n2 >= 1, "StateSpace: ring counts must be >= 1");
    }

    StateSetModel model() const { return model_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    std::size_t size() const { return state_space_size(model_, n1_, n2_); }

    std::size_t index(const AgentState& s) const
    {
        require(s.x1 == 0 || s.x1 == 1, "StateSpace: x1 must be a bit");
        require(s.x2 == 0 || s.x2 == 1, "StateSpace: x2 must be a bit");
        require(s.x3 >= 0 && s.x3 <= n1_ && s.x4 >= 0 && s.x4 <= n2_, "StateSpace: ring index out of range");
        std::size_t bits = 0;
        switch (model_) {
        case StateSetModel::X1X3X4: bits = s.x1; break;
        case StateSetModel::X2X3X4: bits = s.x2; break;
        case StateSetModel::Full: bits = 2 * s.x1 + s.x2; break;
        }
        return (bits * (n1_ + 1) + s.x3) * (n2_ + 1) + s.x4;
    }

    AgentState state(std::size_t idx) const
    {
        require(idx < size(), "StateSpace: index out of range");
        AgentState s;
        s.model = model_;
        s.x4 = static_cast<int>(idx % (n2_ + 1));
        idx /= (n2_ + 1);
        s.x3 = static_cast<int>(idx % (n1_ + 1));
        const auto bits = static_cast<int>(idx / (n1_ + 1));
        switch (model_) {
        case StateSetModel::X1X3X4: s.x1 = bits; break;
        case StateSetModel::X2X3X4: s.x2 = bits; break;
        case StateSetModel::Full:
            s.x1 = bits / 2;
            s.x2 = bits % 2;
            break;
        }
        return s;
    }

    /// Rows an agent can visit once its rings are fixed by geometry.
    std::size_t reachable_rows() const { return std::size_t{1} << indicator_bits(model_); }

private:
    StateSetModel model_;
    int n1_;
    int n2_;
};

struct StateObservationParams {
    double gamma0_threshold = 0.0;
    double gammak_threshold = 0.0;
    std::vector<double> ring_radii_mue_m;
    std::vector<double> ring_radii_mbs_m;
};

/// Pure state evaluation. Thresholds are inclusive.
inline AgentState observe_state(double gamma_k, double gamma_0, double dist_to_mue_m, double dist_to_mbs_m,
                                const StateObservationParams& p, StateSetModel model)
{
    AgentState s;
    s.model = model;
    s.x1 = gamma_k >= p.gammak_threshold ? 1 : 0;
    s.x2 = gamma_0 >= p.gamma0_threshold ? 1 : 0;
    s.x3 = ring_index(dist_to_mue_m, p.ring_radii_mue_m);
    s.x4 = ring_index(dist_to_mbs_m, p.ring_radii_mbs_m);
    if (model == StateSetModel::X1X3X4) s.x2 = 0;
    if (model == StateSetModel::X2X3X4) s.x1 = 0;
    return s;
}

inline StateObservationParams observation_params(const ScenarioConfig& cfg)
{
    return {cfg.gamma0_threshold(), cfg.gammak_threshold(), cfg.ring_radii_mue_m, cfg.ring_radii_mbs_m};
}

inline AgentState observe_state(int k, double gamma_k, double gamma_0, const Scenario& sc, StateSetModel model)
{
    return observe_state(gamma_k, gamma_0, sc.fbs_mue_distance(k), sc.fbs_mbs_distance(k),
                         observation_params(sc.config), model);
}

inline StateSpace state_space(const ScenarioConfig& cfg, StateSetModel model)
{
    return StateSpace(model, static_cast<int>(cfg.ring_radii_mue_m.size()),
                      static_cast<int>(cfg.ring_radii_mbs_m.size()));
}

/// Transmit power grid in watts, ascending.
struct ActionSet {
    std::vector<double> levels_w;
    std::vector<double> levels_dbm;

    std::size_t size() const { return levels_w.size(); }
    double max_power() const { return levels_w.back(); }
};

inline ActionSet action_set(double pmin_dbm, double pmax_dbm, double step_db)
{
    require(step_db > 0.0, "action_set: step must be positive");
    require(pmin_dbm <= pmax_dbm, "action_set: pmin must not exceed pmax");
    const double steps = (pmax_dbm - pmin_dbm) / step_db;
    const double rounded = std::round(steps);
    require(std::abs(steps - rounded) < 1e-9, "action_set: step does not divide the power range");
    ActionSet a;
    for (int i = 0; i <= static_cast<int>(rounded); ++i) {
        const double dbm = pmin_dbm + step_db * i;
        a.levels_dbm.push_back(dbm);
        a.levels_w.push_back(dbm_to_watts(dbm));
    }
    return a;
}

inline ActionSet action_set(const ScenarioConfig& cfg)
{
    return action_set(cfg.fbs_pmin_dbm, cfg.fbs_pmax_dbm, cfg.fbs_step_db);
}

} // namespace qdpa
