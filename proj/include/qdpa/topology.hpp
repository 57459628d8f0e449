#pragma once

// Dual-strip apartment block at the macrocell edge. The MBS sits at the
// origin; the block is centered at (block_distance_m, 0) with the strips
// running along x and a street between them where the MUE is placed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "qdpa/channel.hpp"
#include "qdpa/common.hpp"

namespace qdpa {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct ScenarioConfig {
    double macro_radius_m = 350.0;
    double block_distance_m = 350.0;
    double apartment_size_m = 10.0;
    int apartments_per_strip = 5;
    int strips = 2;
    double street_width_m = 10.0;
    double fue_max_dist_m = 5.0;
    double fue_min_dist_m = 1.0;
    double mue_offset_x_m = 0.0;
    double mue_offset_y_m = 0.0;
    double wall_loss_db = 20.0;
    double mbs_power_dbm = 33.0;
    double fbs_pmin_dbm = 5.0;
    double fbs_pmax_dbm = 15.0;
    double fbs_step_db = 1.0;
    double gamma0_rate = 4.0;
    double gammak_rate = 0.5;
    std::vector<double> ring_radii_mue_m{17.5, 22.5, 45.0};
    std::vector<double> ring_radii_mbs_m{50.0, 150.0, 400.0};
    double density_margin_m = 1.0;
    NoiseModel noise;
    std::uint64_t seed = 1;

    int apartment_count() const { return apartments_per_strip * strips; }
    double gamma0_threshold() const { return sinr_threshold_for_rate(gamma0_rate); }
    double gammak_threshold() const { return sinr_threshold_for_rate(gammak_rate); }

    bool operator==(const ScenarioConfig&) const = default;
};

inline bool strictly_increasing_positive(const std::vector<double>& v)
{
    if (v.empty() || v.front() <= 0.0) return false;
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

inline void validate(const ScenarioConfig& cfg)
{
    require(cfg.strips == 2, "ScenarioConfig: the dual-strip layout needs exactly 2 strips");
    require(cfg.apartments_per_strip >= 1, "ScenarioConfig: apartments_per_strip must be >= 1");
    require(cfg.apartment_size_m > 0.0 && cfg.street_width_m >= 0.0, "ScenarioConfig: bad block dimensions");
    require(cfg.fue_max_dist_m > 0.0 && cfg.fue_max_dist_m <= cfg.apartment_size_m / 2.0,
            "ScenarioConfig: FUE radius must fit inside the apartment");
    require(cfg.fue_min_dist_m > 0.0 && cfg.fue_min_dist_m < cfg.fue_max_dist_m,
            "ScenarioConfig: need 0 < fue_min_dist_m < fue_max_dist_m");
    require(cfg.block_distance_m > 0.0, "ScenarioConfig: block distance must be positive");
    require(cfg.fbs_pmin_dbm <= cfg.fbs_pmax_dbm, "ScenarioConfig: pmin must not exceed pmax");
    require(cfg.fbs_step_db > 0.0, "ScenarioConfig: power step must be positive");
    const double steps = (cfg.fbs_pmax_dbm - cfg.fbs_pmin_dbm) / cfg.fbs_step_db;
    require(std::abs(steps - std::round(steps)) < 1e-9, "ScenarioConfig: step must divide the power range");
    require(strictly_increasing_positive(cfg.ring_radii_mue_m), "ScenarioConfig: MUE ring radii must increase");
    require(strictly_increasing_positive(cfg.ring_radii_mbs_m), "ScenarioConfig: MBS ring radii must increase");
    require(cfg.noise.bandwidth_hz > 0.0, "ScenarioConfig: bandwidth must be positive");
}

/// Region index of a distance against increasing ring radii. A distance
/// equal to a radius belongs to the inner region.
inline int ring_index(double dist_m, const std::vector<double>& radii)
{
    require(!radii.empty(), "ring_index: empty radii list");
    require(dist_m >= 0.0, "ring_index: negative distance");
    const auto it = std::lower_bound(radii.begin(), radii.end(), dist_m);
    return static_cast<int>(it - radii.begin());
}

struct Scenario {
    ScenarioConfig config;
    int k_active = 0;
    Point mbs_pos;
    Point mue_pos;
    std::vector<Point> fbs_pos; // agent k at index k-1
    std::vector<Point> fue_pos;
    std::vector<int> strip;     // strip of each active FBS
    ChannelMatrix channel;

    Network network() const
    {
        return Network{channel, dbm_to_watts(config.mbs_power_dbm), config.noise.power_watts(),
                       config.gamma0_threshold(), config.gammak_threshold()};
    }

    double fbs_mue_distance(int k) const { return distance(fbs_pos.at(k - 1), mue_pos); }
    double fbs_mbs_distance(int k) const { return distance(fbs_pos.at(k - 1), mbs_pos); }

    bool operator==(const Scenario&) const = default;
};

namespace detail {

inline double link_distance(Point a, Point b)
{
    // co-located endpoints would put the pathloss at log10(0)
    return std::max(distance(a, b), 1e-3);
}

} // namespace detail

/// Populates the channel matrix from the geometry of the active pairs.
inline ChannelMatrix build_channel(const ScenarioConfig& cfg, Point mbs, Point mue, const std::vector<Point>& fbs,
                                   const std::vector<Point>& fue, const std::vector<int>& strip)
{
    const std::size_t k = fbs.size();
    ChannelMatrix ch(k);
    const auto gain = [&](LinkKind kind, Point a, Point b) {
        const double r = detail::link_distance(a, b);
        return gain_linear(pathloss_db(kind, r, r, cfg.wall_loss_db));
    };
    ch.set_gain(0, 0, gain(LinkKind::MbsToMue, mbs, mue));
    for (std::size_t i = 1; i <= k; ++i) {
        ch.set_gain(0, i, gain(LinkKind::MbsToFue, mbs, fue[i - 1]));
        ch.set_gain(i, 0, gain(LinkKind::FbsToFueOtherStrip, fbs[i - 1], mue));
        for (std::size_t j = 1; j <= k; ++j) {
            const LinkKind kind =
                strip[i - 1] == strip[j - 1] ? LinkKind::FbsToFueSameStrip : LinkKind::FbsToFueOtherStrip;
            ch.set_gain(i, j, gain(kind, fbs[i - 1], fue[j - 1]));
        }
    }
    return ch;
}

/**
 * Builds the block with the first k_active FBSs switched on.
 *
 * Activation order and FUE placement are drawn once for all apartments from
 * the config seed, so growing k_active never moves an already active pair.
 */
inline Scenario build_scenario(const ScenarioConfig& cfg, int k_active)
{
    validate(cfg);
    require(k_active >= 1 && k_active <= cfg.apartment_count(), "build_scenario: k_active out of range");

    const int n = cfg.apartment_count();
    const double a = cfg.apartment_size_m;
    const double cx = cfg.block_distance_m;
    const double strip_len = a * cfg.apartments_per_strip;

    std::vector<Point> centers;
    std::vector<int> strip_of;
    for (int s = 0; s < cfg.strips; ++s) {
        const double y = (s == 0 ? 1.0 : -1.0) * (cfg.street_width_m / 2.0 + a / 2.0);
        for (int i = 0; i < cfg.apartments_per_strip; ++i) {
            centers.push_back({cx - strip_len / 2.0 + a / 2.0 + a * i, y});
            strip_of.push_back(s);
        }
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    // Uniform over the annulus [fue_min, fue_max]; the disc is inscribed in
    // the apartment square so no rejection is needed.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point> fue_all(n);
    const double r_lo2 = cfg.fue_min_dist_m * cfg.fue_min_dist_m;
    const double r_hi2 = cfg.fue_max_dist_m * cfg.fue_max_dist_m;
    for (int slot = 0; slot < n; ++slot) {
        const double r = std::sqrt(r_lo2 + unit(rng) * (r_hi2 - r_lo2));
        const double theta = 2.0 * std::numbers::pi * unit(rng);
        const Point c = centers[order[slot]];
        fue_all[slot] = {c.x + r * std::cos(theta), c.y + r * std::sin(theta)};
    }

    Scenario sc;
    sc.config = cfg;
    sc.k_active = k_active;
    sc.mbs_pos = {0.0, 0.0};
    sc.mue_pos = {cx + cfg.mue_offset_x_m, cfg.mue_offset_y_m};
    for (int slot = 0; slot < k_active; ++slot) {
        sc.fbs_pos.push_back(centers[order[slot]]);
        sc.fue_pos.push_back(fue_all[slot]);
        sc.strip.push_back(strip_of[order[slot]]);
    }
    sc.channel = build_channel(cfg, sc.mbs_pos, sc.mue_pos, sc.fbs_pos, sc.fue_pos, sc.strip);
    return sc;
}

/// Footprint used for density reporting: the block's bounding box plus a
/// margin on every side.
inline double block_footprint_km2(const ScenarioConfig& cfg)
{
    const double len = cfg.apartment_size_m * cfg.apartments_per_strip + 2.0 * cfg.density_margin_m;
    const double wid = cfg.apartment_size_m * cfg.strips + cfg.street_width_m + 2.0 * cfg.density_margin_m;
    return len * wid * 1e-6;
}

inline double density_fbs_per_km2(int k_active, const ScenarioConfig& cfg)
{
    return static_cast<double>(k_active) / block_footprint_km2(cfg);
}

inline double density_fbs_per_km2(const Scenario& sc) { return density_fbs_per_km2(sc.k_active, sc.config); }

} // namespace qdpa
