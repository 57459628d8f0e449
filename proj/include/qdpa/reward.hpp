#pragma once

// Per-agent reward functions of (r0, rk) given the two tiers' SINR thresholds.
//
//   Proposed     (r0 - t0)^(2m-1) + (rk - tk)^(2m-1)
//   Quadratic    -(r0 - t0)^2 - (rk - tk)^2
//   Exponential  rk - exp(lambda (r0 - t0)^2) + 1
//   Proximity    rk - (d_ref / max(d, 1)) (r0 - t0)^2
//
// with t_i = log2(1 + Gamma_i) and d the FBS-MUE distance. Every kind adds
// the bias constant C.

#include <algorithm>
#include <cmath>
#include <string>

#include "qdpa/common.hpp"

namespace qdpa {

enum class RewardKind { Proposed, Quadratic, Exponential, Proximity };

inline std::string to_string(RewardKind k)
{
    switch (k) {
    case RewardKind::Proposed: return "proposed";
    case RewardKind::Quadratic: return "quadratic";
    case RewardKind::Exponential: return "exponential";
    case RewardKind::Proximity: return "proximity";
    }
    return "unknown";
}

inline RewardKind reward_kind_from_string(const std::string& s)
{
    if (s == "proposed") return RewardKind::Proposed;
    if (s == "quadratic") return RewardKind::Quadratic;
    if (s == "exponential") return RewardKind::Exponential;
    if (s == "proximity") return RewardKind::Proximity;
    throw invalid_input("unknown reward kind '" + s + "'");
}

struct RewardSpec {
    RewardKind kind = RewardKind::Proposed;
    int m = 2;
    double bias_c = 0.0;
    double exp_lambda = 1.0;
    double proximity_ref_m = 45.0;

    bool operator==(const RewardSpec&) const = default;
};

inline void validate(const RewardSpec& spec)
{
    require(spec.m >= 1, "RewardSpec: m must be a positive integer");
    require(std::isfinite(spec.bias_c), "RewardSpec: bias must be finite");
    require(spec.exp_lambda > 0.0, "RewardSpec: exponential lambda must be positive");
    require(spec.proximity_ref_m > 0.0, "RewardSpec: proximity reference distance must be positive");
}

/// Everything a reward needs from one frame.
struct RewardInputs {
    double r0 = 0.0;
    double rk = 0.0;
    double gamma0 = 0.0;        // MUE SINR threshold
    double gammak = 0.0;        // FUE SINR threshold
    double fbs_mue_dist_m = 1.0;
};

inline double proposed_reward(double r0, double rk, double g0, double gk, int m, double c)
{
    require(m >= 1, "proposed_reward: m must be >= 1");
    const int e = 2 * m - 1;
    return std::pow(r0 - std::log2(1.0 + g0), e) + std::pow(rk - std::log2(1.0 + gk), e) + c;
}

inline double comparison_reward(const RewardSpec& spec, const RewardInputs& in)
{
    const double p0 = in.r0 - std::log2(1.0 + in.gamma0);
    const double pk = in.rk - std::log2(1.0 + in.gammak);
    switch (spec.kind) {
    case RewardKind::Quadratic:
        return -p0 * p0 - pk * pk + spec.bias_c;
    case RewardKind::Exponential:
        return in.rk - std::exp(spec.exp_lambda * p0 * p0) + 1.0 + spec.bias_c;
    case RewardKind::Proximity: {
        const double w = spec.proximity_ref_m / std::max(in.fbs_mue_dist_m, 1.0);
        return in.rk - w * p0 * p0 + spec.bias_c;
    }
    case RewardKind::Proposed:
        break;
    }
    throw invalid_input("comparison_reward: not a comparison reward kind");
}

inline double evaluate_reward(const RewardSpec& spec, const RewardInputs& in)
{
    if (spec.kind == RewardKind::Proposed) {
        return proposed_reward(in.r0, in.rk, in.gamma0, in.gammak, spec.m, spec.bias_c);
    }
    return comparison_reward(spec, in);
}

// ---------------------------------------------------------------------------
// Sign-structure checks by central finite differences.

enum class RewardProperty {
    IncreasingInBoth,      // dR/dr_i >= 0 for i = 0, k
    PeakAtThresholds,      // dR/dr_i * (r_i - t_i) <= 0 for i = 0, k
    MuePeakFueIncreasing,  // dR/dr0 * (r0 - t0) <= 0 and dR/drk >= 0
};

enum class CheckStatus { Pass, Fail, Inconclusive };

struct PropertyCheck {
    CheckStatus status = CheckStatus::Inconclusive;
    double d_r0 = 0.0;
    double d_rk = 0.0;
};

inline constexpr double kFiniteDiffStep = 1e-5;
inline constexpr double kThresholdExclusion = 1e-3;

/// \param fn callable (r0, rk) -> reward
/// \param t0 \param tk threshold rates log2(1 + Gamma)
template <typename F>
PropertyCheck check_property_signs(F&& fn, double r0, double rk, double t0, double tk, RewardProperty which)
{
    PropertyCheck out;
    const double h = kFiniteDiffStep;
    out.d_r0 = (fn(r0 + h, rk) - fn(r0 - h, rk)) / (2.0 * h);
    out.d_rk = (fn(r0, rk + h) - fn(r0, rk - h)) / (2.0 * h);
    if (std::abs(r0 - t0) <= kThresholdExclusion || std::abs(rk - tk) <= kThresholdExclusion) {
        out.status = CheckStatus::Inconclusive;
        return out;
    }
    bool ok = false;
    switch (which) {
    case RewardProperty::IncreasingInBoth:
        ok = out.d_r0 >= 0.0 && out.d_rk >= 0.0;
        break;
    case RewardProperty::PeakAtThresholds:
        ok = out.d_r0 * (r0 - t0) <= 0.0 && out.d_rk * (rk - tk) <= 0.0;
        break;
    case RewardProperty::MuePeakFueIncreasing:
        ok = out.d_r0 * (r0 - t0) <= 0.0 && out.d_rk >= 0.0;
        break;
    }
    out.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    return out;
}

/// Binds a spec and thresholds into an (r0, rk) callable.
inline auto reward_surface(const RewardSpec& spec, double gamma0, double gammak, double fbs_mue_dist_m = 1.0)
{
    return [=](double r0, double rk) {
        return evaluate_reward(spec, RewardInputs{r0, rk, gamma0, gammak, fbs_mue_dist_m});
    };
}

} // namespace qdpa
