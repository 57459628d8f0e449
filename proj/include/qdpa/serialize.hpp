#pragma once

// JSON for configurations, scenarios and solver results; CSV for metrics
// and Q-tables. Reading a config only overrides the keys present.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdpa/baselines.hpp"
#include "qdpa/harness.hpp"
#include "qdpa/learning.hpp"
#include "qdpa/topology.hpp"

namespace qdpa {

using json = nlohmann::json;

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
void read_opt(const json& j, const char* key, T& out)
{
    if (!j.is_object()) throw invalid_input("expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        it->get_to(out);
    } catch (const json::exception& e) {
        throw invalid_input(std::string("config key '") + key + "': " + e.what());
    }
}

/// Shortest text that parses back to the same double.
inline std::string fmt_double(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream f(path);
    if (!f) throw io_error("cannot open '" + path.string() + "' for writing");
    f << std::setprecision(17);
    return f;
}

inline std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f) throw io_error("cannot open '" + path.string() + "' for reading");
    return f;
}

} // namespace detail

// --- configuration -----------------------------------------------------------

inline void to_json(json& j, const NoiseModel& n)
{
    j = {{"density_dbm_per_hz", n.density_dbm_per_hz}, {"bandwidth_hz", n.bandwidth_hz}};
}

inline void from_json(const json& j, NoiseModel& n)
{
    detail::read_opt(j, "density_dbm_per_hz", n.density_dbm_per_hz);
    detail::read_opt(j, "bandwidth_hz", n.bandwidth_hz);
}

inline void to_json(json& j, const ScenarioConfig& c)
{
    j = {{"macro_radius_m", c.macro_radius_m},
         {"block_distance_m", c.block_distance_m},
         {"apartment_size_m", c.apartment_size_m},
         {"apartments_per_strip", c.apartments_per_strip},
         {"strips", c.strips},
         {"street_width_m", c.street_width_m},
         {"fue_max_dist_m", c.fue_max_dist_m},
         {"fue_min_dist_m", c.fue_min_dist_m},
         {"mue_offset_x_m", c.mue_offset_x_m},
         {"mue_offset_y_m", c.mue_offset_y_m},
         {"wall_loss_db", c.wall_loss_db},
         {"mbs_power_dbm", c.mbs_power_dbm},
         {"fbs_pmin_dbm", c.fbs_pmin_dbm},
         {"fbs_pmax_dbm", c.fbs_pmax_dbm},
         {"fbs_step_db", c.fbs_step_db},
         {"gamma0_rate", c.gamma0_rate},
         {"gammak_rate", c.gammak_rate},
         {"ring_radii_mue_m", c.ring_radii_mue_m},
         {"ring_radii_mbs_m", c.ring_radii_mbs_m},
         {"density_margin_m", c.density_margin_m},
         {"noise", c.noise},
         {"seed", c.seed}};
}

inline void from_json(const json& j, ScenarioConfig& c)
{
    using detail::read_opt;
    read_opt(j, "macro_radius_m", c.macro_radius_m);
    read_opt(j, "block_distance_m", c.block_distance_m);
    read_opt(j, "apartment_size_m", c.apartment_size_m);
    read_opt(j, "apartments_per_strip", c.apartments_per_strip);
    read_opt(j, "strips", c.strips);
    read_opt(j, "street_width_m", c.street_width_m);
    read_opt(j, "fue_max_dist_m", c.fue_max_dist_m);
    read_opt(j, "fue_min_dist_m", c.fue_min_dist_m);
    read_opt(j, "mue_offset_x_m", c.mue_offset_x_m);
    read_opt(j, "mue_offset_y_m", c.mue_offset_y_m);
    read_opt(j, "wall_loss_db", c.wall_loss_db);
    read_opt(j, "mbs_power_dbm", c.mbs_power_dbm);
    read_opt(j, "fbs_pmin_dbm", c.fbs_pmin_dbm);
    read_opt(j, "fbs_pmax_dbm", c.fbs_pmax_dbm);
    read_opt(j, "fbs_step_db", c.fbs_step_db);
    read_opt(j, "gamma0_rate", c.gamma0_rate);
    read_opt(j, "gammak_rate", c.gammak_rate);
    read_opt(j, "ring_radii_mue_m", c.ring_radii_mue_m);
    read_opt(j, "ring_radii_mbs_m", c.ring_radii_mbs_m);
    read_opt(j, "density_margin_m", c.density_margin_m);
    read_opt(j, "noise", c.noise);
    read_opt(j, "seed", c.seed);
}

inline void to_json(json& j, const LearningConfig& c)
{
    j = {{"beta", c.beta},
         {"epsilon_explore", c.epsilon_explore},
         {"mode", to_string(c.mode)},
         {"training_frames", c.training_frames},
         {"rng_seed", c.rng_seed}};
}

inline void from_json(const json& j, LearningConfig& c)
{
    detail::read_opt(j, "beta", c.beta);
    detail::read_opt(j, "epsilon_explore", c.epsilon_explore);
    std::string mode = to_string(c.mode);
    detail::read_opt(j, "mode", mode);
    c.mode = learning_mode_from_string(mode);
    detail::read_opt(j, "training_frames", c.training_frames);
    detail::read_opt(j, "rng_seed", c.rng_seed);
}

inline void to_json(json& j, const RewardSpec& r)
{
    j = {{"kind", to_string(r.kind)},
         {"m", r.m},
         {"bias_c", r.bias_c},
         {"exp_lambda", r.exp_lambda},
         {"proximity_ref_m", r.proximity_ref_m}};
}

inline void from_json(const json& j, RewardSpec& r)
{
    std::string kind = to_string(r.kind);
    detail::read_opt(j, "kind", kind);
    r.kind = reward_kind_from_string(kind);
    detail::read_opt(j, "m", r.m);
    detail::read_opt(j, "bias_c", r.bias_c);
    detail::read_opt(j, "exp_lambda", r.exp_lambda);
    detail::read_opt(j, "proximity_ref_m", r.proximity_ref_m);
}

inline void to_json(json& j, const BaselineFlags& b)
{
    j = {{"greedy", b.greedy},
         {"exhaustive", b.exhaustive},
         {"exhaustive_budget", b.exhaustive_budget},
         {"exhaustive_step_db", b.exhaustive_step_db}};
}

inline void from_json(const json& j, BaselineFlags& b)
{
    detail::read_opt(j, "greedy", b.greedy);
    detail::read_opt(j, "exhaustive", b.exhaustive);
    detail::read_opt(j, "exhaustive_budget", b.exhaustive_budget);
    detail::read_opt(j, "exhaustive_step_db", b.exhaustive_step_db);
}

inline void to_json(json& j, const TheoryTargets& t) { j = {{"optimality", t.optimality}, {"delta", t.delta}}; }

inline void from_json(const json& j, TheoryTargets& t)
{
    detail::read_opt(j, "optimality", t.optimality);
    detail::read_opt(j, "delta", t.delta);
}

inline void to_json(json& j, const RunConfig& c)
{
    j = {{"scenario", c.scenario},
         {"learning", c.learning},
         {"state_model", to_string(c.state_model)},
         {"reward", c.reward},
         {"k_max", c.k_max},
         {"seeds", c.seeds},
         {"baselines", c.baselines},
         {"output_dir", c.output_dir},
         {"frame_time_ms", c.frame_time_ms},
         {"theory", c.theory},
         {"workers", c.workers}};
}

inline void from_json(const json& j, RunConfig& c)
{
    using detail::read_opt;
    static const char* const known[] = {"scenario", "learning", "state_model", "reward",        "k_max", "seeds",
                                        "baselines", "output_dir", "frame_time_ms", "theory", "workers"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw invalid_input("unknown config key '" + key + "'");
        }
    }
    read_opt(j, "scenario", c.scenario);
    read_opt(j, "learning", c.learning);
    std::string model = to_string(c.state_model);
    read_opt(j, "state_model", model);
    c.state_model = state_model_from_string(model);
    read_opt(j, "reward", c.reward);
    read_opt(j, "k_max", c.k_max);
    read_opt(j, "seeds", c.seeds);
    read_opt(j, "baselines", c.baselines);
    read_opt(j, "output_dir", c.output_dir);
    read_opt(j, "frame_time_ms", c.frame_time_ms);
    read_opt(j, "theory", c.theory);
    read_opt(j, "workers", c.workers);
}

inline json read_json_file(const std::filesystem::path& path)
{
    auto f = detail::open_in(path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw invalid_input("'" + path.string() + "': " + e.what());
    }
}

inline RunConfig load_run_config(const std::filesystem::path& path)
{
    RunConfig cfg;
    from_json(read_json_file(path), cfg);
    validate(cfg);
    return cfg;
}

// --- scenario ------------------------------------------------------------------

inline constexpr const char* kScenarioFormat = "qdpa-scenario";
inline constexpr int kScenarioVersion = 1;

inline json point_json(Point p) { return json::array({p.x, p.y}); }

inline Point point_from(const json& j)
{
    require(j.is_array() && j.size() == 2, "scenario: a point is [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json scenario_to_json(const Scenario& sc)
{
    json fbs = json::array(), fue = json::array(), gains = json::array();
    for (Point p : sc.fbs_pos) fbs.push_back(point_json(p));
    for (Point p : sc.fue_pos) fue.push_back(point_json(p));
    for (std::size_t i = 0; i < sc.channel.dimension(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < sc.channel.dimension(); ++j) row.push_back(sc.channel.gain(i, j));
        gains.push_back(row);
    }
    return {{"format", kScenarioFormat},
            {"version", kScenarioVersion},
            {"config", sc.config},
            {"k_active", sc.k_active},
            {"mbs", point_json(sc.mbs_pos)},
            {"mue", point_json(sc.mue_pos)},
            {"fbs", fbs},
            {"fue", fue},
            {"strip", sc.strip},
            {"gains", gains}};
}

/// Gains are taken from the document as stored, not recomputed, so a file
/// can carry a hand-made channel.
inline Scenario scenario_from_json(const json& j)
{
    try {
        require(j.value("format", "") == kScenarioFormat, "scenario: missing or wrong 'format'");
        require(j.value("version", 0) == kScenarioVersion,
                "scenario: unsupported version (expected " + std::to_string(kScenarioVersion) + ")");
        Scenario sc;
        from_json(j.at("config"), sc.config);
        sc.k_active = j.at("k_active").get<int>();
        require(sc.k_active >= 0, "scenario: negative k_active");
        sc.mbs_pos = point_from(j.at("mbs"));
        sc.mue_pos = point_from(j.at("mue"));
        for (const auto& p : j.at("fbs")) sc.fbs_pos.push_back(point_from(p));
        for (const auto& p : j.at("fue")) sc.fue_pos.push_back(point_from(p));
        sc.strip = j.at("strip").get<std::vector<int>>();
        const auto k = static_cast<std::size_t>(sc.k_active);
        require(sc.fbs_pos.size() == k && sc.fue_pos.size() == k && sc.strip.size() == k,
                "scenario: position lists must have k_active entries");
        const json& g = j.at("gains");
        require(g.is_array() && g.size() == k + 1, "scenario: gains must be a (k_active+1)^2 matrix");
        sc.channel = ChannelMatrix(k);
        for (std::size_t r = 0; r <= k; ++r) {
            require(g[r].is_array() && g[r].size() == k + 1, "scenario: gains must be a (k_active+1)^2 matrix");
            for (std::size_t c = 0; c <= k; ++c) sc.channel.set_gain(r, c, g[r][c].get<double>());
        }
        return sc;
    } catch (const json::exception& e) {
        throw invalid_input(std::string("scenario: ") + e.what());
    }
}

inline void save_scenario(const Scenario& sc, const std::filesystem::path& path)
{
    auto f = detail::open_out(path);
    f << scenario_to_json(sc).dump(2) << '\n';
}

inline Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json_file(path)); }

inline json solve_result_json(const SolveResult& r)
{
    std::vector<double> dbm;
    for (double p : r.best_powers) dbm.push_back(watts_to_dbm(p));
    return {{"feasible", r.feasible},
            {"objective", r.objective},
            {"best_powers_w", r.best_powers},
            {"best_powers_dbm", dbm},
            {"best_actions", r.best_actions},
            {"evaluated_count", r.evaluated_count},
            {"min_relative_slack", r.min_relative_slack}};
}

// --- CSV -------------------------------------------------------------------------

inline const std::vector<std::string>& metrics_columns()
{
    static const std::vector<std::string> cols{"seed",         "k_active",     "method",           "state_model",
                                               "reward_kind",  "mue_rate",     "fue_sum_rate",     "fbs_sum_power_mw",
                                               "mue_ok",       "fue_ok_frac",  "cl_messages"};
    return cols;
}

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records)
{
    const auto& cols = metrics_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : records) {
        os << r.seed << ',' << r.k_active << ',' << r.method << ',' << r.state_model << ',' << r.reward_kind << ','
           << detail::fmt_double(r.mue_rate) << ',' << detail::fmt_double(r.fue_sum_rate) << ','
           << detail::fmt_double(r.fbs_sum_power_mw) << ',' << (r.mue_ok ? 1 : 0) << ','
           << detail::fmt_double(r.fue_ok_frac) << ',' << r.cl_messages << '\n';
    }
}

/// Per-agent powers in watts, one row per record, same order as metrics.csv.
inline void write_powers_csv(std::ostream& os, const std::vector<MetricsRecord>& records)
{
    os << "seed,k_active,method,powers_w\n";
    for (const auto& r : records) {
        os << r.seed << ',' << r.k_active << ',' << r.method << ',';
        for (std::size_t i = 0; i < r.powers_w.size(); ++i) os << (i ? ";" : "") << detail::fmt_double(r.powers_w[i]);
        os << '\n';
    }
}

/// Parses metrics.csv; powers_w stays empty (it lives in powers.csv).
inline std::vector<MetricsRecord> read_metrics_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw invalid_input("metrics csv: missing header");
    const auto header = detail::split_csv_line(line);
    require(header == metrics_columns(), "metrics csv: unexpected header");
    std::vector<MetricsRecord> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto c = detail::split_csv_line(line);
        require(c.size() == header.size(), "metrics csv: wrong column count on line " + std::to_string(lineno));
        try {
            MetricsRecord r;
            r.seed = std::stoull(c[0]);
            r.k_active = std::stoi(c[1]);
            r.method = c[2];
            r.state_model = c[3];
            r.reward_kind = c[4];
            r.mue_rate = std::stod(c[5]);
            r.fue_sum_rate = std::stod(c[6]);
            r.fbs_sum_power_mw = std::stod(c[7]);
            r.mue_ok = c[8] == "1";
            r.fue_ok_frac = std::stod(c[9]);
            r.cl_messages = std::stoull(c[10]);
            out.push_back(std::move(r));
        } catch (const std::logic_error& e) {
            throw invalid_input("metrics csv: bad value on line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline void read_powers_csv(std::istream& is, std::vector<MetricsRecord>& records)
{
    std::string line;
    std::getline(is, line);
    std::size_t i = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto c = detail::split_csv_line(line);
        require(c.size() == 4 && i < records.size(), "powers csv: does not match metrics csv");
        require(std::stoull(c[0]) == records[i].seed && std::stoi(c[1]) == records[i].k_active &&
                    c[2] == records[i].method,
                "powers csv: row order differs from metrics csv");
        std::istringstream cell(c[3]);
        std::string tok;
        records[i].powers_w.clear();
        while (std::getline(cell, tok, ';')) records[i].powers_w.push_back(std::stod(tok));
        ++i;
    }
    require(i == records.size(), "powers csv: row count differs from metrics csv");
}

/// One row per state, one column per action.
inline void write_qtable_csv(std::ostream& values, std::ostream& visits, const QTable& q)
{
    values << "state";
    visits << "state";
    for (std::size_t a = 0; a < q.actions(); ++a) {
        values << ",a" << a;
        visits << ",a" << a;
    }
    values << '\n';
    visits << '\n';
    for (std::size_t s = 0; s < q.states(); ++s) {
        values << s;
        visits << s;
        for (std::size_t a = 0; a < q.actions(); ++a) {
            values << ',' << detail::fmt_double(q.value(s, a));
            visits << ',' << q.visits(s, a);
        }
        values << '\n';
        visits << '\n';
    }
}

inline QTable read_qtable_csv(std::istream& values, std::istream& visits)
{
    std::vector<std::vector<std::string>> vrows, nrows;
    std::string line;
    for (auto pair : {std::pair{&values, &vrows}, std::pair{&visits, &nrows}}) {
        std::getline(*pair.first, line);
        while (std::getline(*pair.first, line)) {
            if (!line.empty()) pair.second->push_back(detail::split_csv_line(line));
        }
    }
    require(!vrows.empty() && vrows.size() == nrows.size(), "qtable csv: value and visit tables differ in shape");
    const std::size_t actions = vrows.front().size() - 1;
    QTable q(vrows.size(), actions);
    for (std::size_t s = 0; s < vrows.size(); ++s) {
        require(vrows[s].size() == actions + 1 && nrows[s].size() == actions + 1, "qtable csv: ragged row");
        for (std::size_t a = 0; a < actions; ++a) {
            q.set_value(s, a, std::stod(vrows[s][a + 1]));
            q.set_visits(s, a, std::stoull(nrows[s][a + 1]));
        }
    }
    return q;
}

} // namespace qdpa
