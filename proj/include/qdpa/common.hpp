#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qdpa {

/// Raised when an operation receives arguments outside its domain.
class invalid_input : public std::invalid_argument {
public:
    explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw invalid_input(message);
    }
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

/// Threshold SINR corresponding to a normalized rate requirement, 2^rate - 1.
inline double sinr_threshold_for_rate(double rate_bps_hz) { return std::exp2(rate_bps_hz) - 1.0; }

} // namespace qdpa
