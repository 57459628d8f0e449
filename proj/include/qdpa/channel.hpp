#pragma once

// Link budget for the two-tier downlink on a single subband: 3GPP urban
// dual-strip pathloss, deterministic link gains, thermal noise, SINR and
// normalized rates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qdpa/common.hpp"

namespace qdpa {

enum class LinkKind {
    MbsToMue,
    MbsToFue,
    FbsToFueSameStrip,
    FbsToFueOtherStrip, // also FBS -> MUE
};

inline std::string to_string(LinkKind kind)
{
    switch (kind) {
    case LinkKind::MbsToMue: return "mbs-mue";
    case LinkKind::MbsToFue: return "mbs-fue";
    case LinkKind::FbsToFueSameStrip: return "fbs-fue-same-strip";
    case LinkKind::FbsToFueOtherStrip: return "fbs-fue-other-strip";
    }
    return "unknown";
}

/**
 * Urban dual-strip pathloss in dB.
 *
 * \param kind          link category (selects the model row)
 * \param r_m           transmitter-receiver distance in meters
 * \param d2d_indoor_m  2-D indoor distance; equals r_m for single-floor apartments
 * \param l_ow_db       outdoor wall penetration loss
 */
inline double pathloss_db(LinkKind kind, double r_m, double d2d_indoor_m, double l_ow_db = 20.0)
{
    require(r_m > 0.0 && std::isfinite(r_m), "pathloss_db: distance must be positive and finite");
    require(d2d_indoor_m >= 0.0, "pathloss_db: indoor distance must be non-negative");

    const double macro = 15.3 + 37.6 * std::log10(r_m);
    switch (kind) {
    case LinkKind::MbsToMue:
        return macro;
    case LinkKind::MbsToFue:
        return macro + l_ow_db;
    case LinkKind::FbsToFueSameStrip:
        return 56.76 + 20.0 * std::log10(r_m) + 0.7 * d2d_indoor_m;
    case LinkKind::FbsToFueOtherStrip:
        return std::max(macro, 38.46 + 20.0 * std::log10(r_m)) + 18.3 + 0.7 * d2d_indoor_m + l_ow_db;
    }
    throw invalid_input("pathloss_db: unknown link kind");
}

inline double gain_linear(double pl_db) { return std::pow(10.0, -pl_db / 10.0); }

struct NoiseModel {
    double density_dbm_per_hz = -174.0;
    double bandwidth_hz = 180e3;

    double power_watts() const
    {
        require(bandwidth_hz > 0.0, "NoiseModel: bandwidth must be positive");
        return dbm_to_watts(density_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
    }

    bool operator==(const NoiseModel&) const = default;
};

/// Square matrix of linear power gains; index 0 is the MBS/MUE pair and
/// 1..K the FBS/FUE pairs. gain(i, j) is transmitter i to receiver j.
class ChannelMatrix {
public:
    ChannelMatrix() = default;

    explicit ChannelMatrix(std::size_t pairs) : n_(pairs + 1), gains_(n_ * n_, 1.0) {}

    std::size_t femto_count() const { return n_ == 0 ? 0 : n_ - 1; }
    std::size_t dimension() const { return n_; }

    double gain(std::size_t tx, std::size_t rx) const { return gains_[tx * n_ + rx]; }
    double to_mue(std::size_t tx) const { return gain(tx, 0); }

    void set_gain(std::size_t tx, std::size_t rx, double g)
    {
        require(tx < n_ && rx < n_, "ChannelMatrix: index out of range");
        require(g > 0.0 && std::isfinite(g), "ChannelMatrix: gains must be positive and finite");
        gains_[tx * n_ + rx] = g;
    }

    /// Column 0: every transmitter's gain towards the MUE.
    std::vector<double> gains_to_mue() const
    {
        std::vector<double> out(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            out[i] = to_mue(i);
        }
        return out;
    }

    bool operator==(const ChannelMatrix&) const = default;

private:
    std::size_t n_ = 1;
    std::vector<double> gains_ = std::vector<double>(1, 1.0);
};

/// gamma_0 = p0 |h00|^2 / (sum_k p_k |h_k0|^2 + N0)
inline double sinr_mue(double p0, std::span<const double> powers, const ChannelMatrix& ch, double n0)
{
    require(powers.size() == ch.femto_count(), "sinr_mue: power vector size does not match channel");
    require(n0 > 0.0, "sinr_mue: noise power must be positive");
    double interference = 0.0;
    for (std::size_t k = 0; k < powers.size(); ++k) {
        interference += powers[k] * ch.to_mue(k + 1);
    }
    return p0 * ch.gain(0, 0) / (interference + n0);
}

/// gamma_k for agent k in 1..K.
inline double sinr_fue(std::size_t k, double p0, std::span<const double> powers, const ChannelMatrix& ch,
                       double nk)
{
    require(powers.size() == ch.femto_count(), "sinr_fue: power vector size does not match channel");
    require(k >= 1 && k <= powers.size(), "sinr_fue: agent index out of range");
    require(nk > 0.0, "sinr_fue: noise power must be positive");
    double interference = p0 * ch.gain(0, k) + nk;
    for (std::size_t j = 1; j <= powers.size(); ++j) {
        if (j != k) {
            interference += powers[j - 1] * ch.gain(j, k);
        }
    }
    return powers[k - 1] * ch.gain(k, k) / interference;
}

inline double rate(double gamma) { return std::log2(1.0 + gamma); }

/// Physical-layer view of a deployment: gains, fixed MBS power, noise and
/// the SINR thresholds of both tiers.
struct Network {
    ChannelMatrix channel;
    double mbs_power_w = 0.0;
    double noise_w = 0.0;
    double gamma0_threshold = 0.0;
    double gammak_threshold = 0.0;

    std::size_t femto_count() const { return channel.femto_count(); }
};

struct LinkReport {
    double gamma0 = 0.0;
    double r0 = 0.0;
    std::vector<double> gammas; // per FUE, agent k at index k-1
    std::vector<double> rates;

    double fue_sum_rate() const
    {
        double s = 0.0;
        for (double r : rates) s += r;
        return s;
    }
};

inline LinkReport evaluate_links(const Network& net, std::span<const double> powers)
{
    LinkReport rep;
    rep.gamma0 = sinr_mue(net.mbs_power_w, powers, net.channel, net.noise_w);
    rep.r0 = rate(rep.gamma0);
    rep.gammas.resize(powers.size());
    rep.rates.resize(powers.size());
    for (std::size_t k = 1; k <= powers.size(); ++k) {
        rep.gammas[k - 1] = sinr_fue(k, net.mbs_power_w, powers, net.channel, net.noise_w);
        rep.rates[k - 1] = rate(rep.gammas[k - 1]);
    }
    return rep;
}

} // namespace qdpa
