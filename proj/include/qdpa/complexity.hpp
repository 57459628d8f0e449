#pragma once

// High-probability error bound of tabular Q-learning with alpha = 1/(1+t)
// and the iteration count that inverts its dominant term.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "qdpa/common.hpp"
#include "qdpa/reward.hpp"
#include "qdpa/topology.hpp"

namespace qdpa {

struct ComplexityInputs {
    double r_max = 1.0;
    double beta = 0.9;
    double epsilon = 0.1;
    double delta = 0.1;
    double x_card = 1.0;
    double a_card = 1.0;
    double t = 1.0;
};

namespace detail {

inline void check_common(double r_max, double beta, double delta, double x_card, double a_card)
{
    require(r_max > 0.0, "complexity: R_max must be positive");
    require(beta > 0.0 && beta < 1.0, "complexity: beta must be in (0, 1)");
    require(delta > 0.0 && delta <= 1.0, "complexity: delta must be in (0, 1]");
    require(x_card >= 1.0 && a_card >= 1.0, "complexity: state and action counts must be >= 1");
}

} // namespace detail

/// (2 R_max / (1-beta)) [ beta / (T (1-beta)) + sqrt((2/T) ln(2 |X| |A| / delta)) ]
inline double epsilon_bound(const ComplexityInputs& in)
{
    detail::check_common(in.r_max, in.beta, in.delta, in.x_card, in.a_card);
    require(in.t >= 1.0, "epsilon_bound: T must be >= 1");
    const double log_term = std::log(2.0 * in.x_card * in.a_card / in.delta);
    return 2.0 * in.r_max / (1.0 - in.beta) *
           (in.beta / (in.t * (1.0 - in.beta)) + std::sqrt(2.0 / in.t * log_term));
}

/// ceil( 8 R_max^2 / (eps^2 (1-beta)^2) * ln(2 |X| |A| / delta) )
inline std::uint64_t min_iterations(double r_max, double beta, double epsilon, double delta, double x_card,
                                    double a_card)
{
    detail::check_common(r_max, beta, delta, x_card, a_card);
    require(epsilon > 0.0, "min_iterations: epsilon must be positive");
    const double t = 8.0 * r_max * r_max / (epsilon * epsilon * (1.0 - beta) * (1.0 - beta)) *
                     std::log(2.0 * x_card * a_card / delta);
    const double c = std::ceil(t);
    if (c >= static_cast<double>(std::numeric_limits<std::uint64_t>::max())) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(c);
}

/// Frames for the training period: T x |X| x |A|. Saturates on overflow.
inline std::uint64_t training_length(std::uint64_t t, std::uint64_t x_card, std::uint64_t a_card)
{
    require(t >= 1 && x_card >= 1 && a_card >= 1, "training_length: all inputs must be positive");
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    if (t > kMax / x_card) return kMax;
    const std::uint64_t tx = t * x_card;
    if (tx > kMax / a_card) return kMax;
    return tx * a_card;
}

/// Reachable rate box: r0 in [0, r0_max], rk in [0, rk_max].
struct RateBox {
    double r0_max = 0.0;
    double rk_max = 0.0;
};

/// max |R| over the rate box. Each reward is a sum of a term in r0 and a
/// term in rk, each monotone on either side of its threshold, so the
/// extremes lie on {0, threshold, upper edge} per coordinate.
inline double reward_bound(const RateBox& box, const RewardSpec& spec, double gamma0, double gammak,
                           double fbs_mue_dist_m = 1.0)
{
    const double t0 = std::log2(1.0 + gamma0);
    const double tk = std::log2(1.0 + gammak);
    const std::array<double, 3> r0s{0.0, std::clamp(t0, 0.0, box.r0_max), box.r0_max};
    const std::array<double, 3> rks{0.0, std::clamp(tk, 0.0, box.rk_max), box.rk_max};
    const auto f = reward_surface(spec, gamma0, gammak, fbs_mue_dist_m);
    double m = 0.0;
    for (double r0 : r0s)
        for (double rk : rks) m = std::max(m, std::abs(f(r0, rk)));
    return m;
}

/// Box from interference-free rates at full power, for every FBS of the scenario.
inline RateBox rate_box(const Scenario& sc)
{
    const Network net = sc.network();
    RateBox box;
    box.r0_max = rate(net.mbs_power_w * net.channel.gain(0, 0) / net.noise_w);
    const double pmax = dbm_to_watts(sc.config.fbs_pmax_dbm);
    for (int k = 1; k <= sc.k_active; ++k) {
        box.rk_max = std::max(box.rk_max, rate(pmax * net.channel.gain(k, k) / net.noise_w));
    }
    return box;
}

/// Largest reward magnitude any active agent of the scenario can observe.
inline double reward_bound(const Scenario& sc, const RewardSpec& spec)
{
    const RateBox box = rate_box(sc);
    double m = 0.0;
    for (int k = 1; k <= sc.k_active; ++k) {
        m = std::max(m, reward_bound(box, spec, sc.config.gamma0_threshold(), sc.config.gammak_threshold(),
                                     sc.fbs_mue_distance(k)));
    }
    return m;
}

} // namespace qdpa
