#pragma once

// Output directory layout of a run:
//   metrics.csv, powers.csv, config.json, summary.json,
//   qtables/seed<S>_fbs<k>_values.csv and _visits.csv

#include <filesystem>
#include <string>
#include <vector>

#include "qdpa/harness.hpp"
#include "qdpa/serialize.hpp"

namespace qdpa {

inline json theory_json(const TheoryReport& t)
{
    return {{"r_max", t.r_max},
            {"v_max", t.v_max},
            {"epsilon", t.epsilon},
            {"delta", t.delta},
            {"t_iterations", t.t_iterations},
            {"l_theoretical_frames", t.l_theoretical},
            {"l_practical_frames", t.l_practical},
            {"theoretical_seconds_per_fbs", t.theoretical_seconds_per_fbs},
            {"practical_seconds_per_fbs", t.practical_seconds_per_fbs}};
}

inline json series_json(const std::vector<MetricsRecord>& records)
{
    json series = json::array();
    for (const SeriesPoint& p : aggregate(records)) {
        series.push_back({{"method", p.method},
                          {"k_active", p.k_active},
                          {"n", p.n},
                          {"mue_rate_mean", p.mue_rate_mean},
                          {"mue_rate_ci95", p.mue_rate_ci95},
                          {"fue_sum_rate_mean", p.fue_sum_rate_mean},
                          {"fue_sum_rate_ci95", p.fue_sum_rate_ci95},
                          {"fbs_sum_power_mw_mean", p.fbs_sum_power_mw_mean},
                          {"fbs_sum_power_mw_ci95", p.fbs_sum_power_mw_ci95},
                          {"mue_ok_frac", p.mue_ok_frac}});
    }
    return series;
}

inline json summary_json(const RunResult& res)
{
    json warnings = json::array();
    for (const auto& s : res.seeds)
        for (const auto& w : s.warnings) warnings.push_back(w);
    return {{"series", series_json(res.records)}, {"theory", theory_json(res.theory)}, {"warnings", warnings}};
}

inline void write_metrics(const std::vector<MetricsRecord>& records, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create '" + dir.string() + "': " + ec.message());
    auto m = detail::open_out(dir / "metrics.csv");
    write_metrics_csv(m, records);
    auto p = detail::open_out(dir / "powers.csv");
    write_powers_csv(p, records);
    if (!m || !p) throw io_error("write failed in '" + dir.string() + "'");
}

/// Full run output: metrics, config echo, Q-tables and the summary.
inline void write_run(const RunResult& res, const RunConfig& cfg, const std::filesystem::path& dir)
{
    write_metrics(res.records, dir);
    {
        auto f = detail::open_out(dir / "config.json");
        f << json(cfg).dump(2) << '\n';
    }
    {
        auto f = detail::open_out(dir / "summary.json");
        f << summary_json(res).dump(2) << '\n';
    }
    const auto qdir = dir / "qtables";
    std::filesystem::create_directories(qdir);
    for (const SeedRun& s : res.seeds) {
        for (std::size_t k = 0; k < s.tables.size(); ++k) {
            const std::string stem = "seed" + std::to_string(s.seed) + "_fbs" + std::to_string(k + 1);
            auto v = detail::open_out(qdir / (stem + "_values.csv"));
            auto n = detail::open_out(qdir / (stem + "_visits.csv"));
            write_qtable_csv(v, n, s.tables[k]);
        }
    }
}

/// Metrics plus powers, as written by write_metrics.
inline std::vector<MetricsRecord> read_metrics(const std::filesystem::path& dir)
{
    auto m = detail::open_in(dir / "metrics.csv");
    auto records = read_metrics_csv(m);
    if (std::filesystem::exists(dir / "powers.csv")) {
        auto p = detail::open_in(dir / "powers.csv");
        read_powers_csv(p, records);
    }
    return records;
}

inline json comparison_json(const Comparison& c)
{
    json table = json::array();
    for (const RankRow& r : c.ranking) {
        table.push_back({{"label", r.label},
                         {"sum_power_mw", r.sum_power_mw},
                         {"sum_rate", r.sum_rate},
                         {"mue_rate", r.mue_rate},
                         {"rank_power", r.rank_power},
                         {"rank_sum_rate", r.rank_sum_rate},
                         {"rank_mue_rate", r.rank_mue_rate}});
    }
    json runs = json::object();
    for (const LabeledRun& r : c.runs) runs[r.label] = series_json(r.result.records);
    return {{"k_eval", c.k_eval}, {"ranking", table}, {"series", runs}};
}

/// Rank table as plain text, one configuration per line.
inline std::string ranking_table(const Comparison& c)
{
    std::ostringstream os;
    os << "configuration   sum_p_k  sum_r_k  r_0   (ranks at K=" << c.k_eval << ")\n";
    for (const RankRow& r : c.ranking) {
        os << std::left << std::setw(16) << r.label << std::setw(9) << r.rank_power << std::setw(9)
           << r.rank_sum_rate << r.rank_mue_rate << '\n';
    }
    return os.str();
}

inline void write_comparison(const Comparison& c, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    for (const LabeledRun& r : c.runs) {
        std::string safe = r.label;
        std::replace(safe.begin(), safe.end(), '+', '_');
        write_run(r.result, r.config, dir / safe);
    }
    auto f = detail::open_out(dir / "comparison.json");
    f << comparison_json(c).dump(2) << '\n';
    auto t = detail::open_out(dir / "ranking.txt");
    t << ranking_table(c);
}

/// Reward over an r0 x rk grid, long format.
inline void write_reward_surface(std::ostream& os, const RewardSpec& spec, double gamma0, double gammak,
                                 double fbs_mue_dist_m, double r0_max, double rk_max, std::size_t n)
{
    require(n >= 2, "reward surface: need at least 2 points per axis");
    require(r0_max > 0.0 && rk_max > 0.0, "reward surface: axis ranges must be positive");
    const auto f = reward_surface(spec, gamma0, gammak, fbs_mue_dist_m);
    os << std::setprecision(17) << "r0,rk,reward\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double r0 = r0_max * static_cast<double>(i) / static_cast<double>(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            const double rk = rk_max * static_cast<double>(j) / static_cast<double>(n - 1);
            os << r0 << ',' << rk << ',' << f(r0, rk) << '\n';
        }
    }
}

} // namespace qdpa
