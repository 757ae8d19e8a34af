#pragma once

#include "rvs/term_source.hpp"

#include <string>
#include <string_view>

namespace rvs {

/// Weight b(n) for the second-order statistic b(n)(alpha(n) - alpha).
struct WeightFamily {
    enum class Kind { Log, LogLog, Power, LogPower };

    Kind kind = Kind::Log;
    double exponent = 1.0; // r for Power, theta for LogPower

    static WeightFamily log() { return {Kind::Log, 1.0}; }
    static WeightFamily loglog() { return {Kind::LogLog, 1.0}; }
    static WeightFamily power(double r) { return {Kind::Power, r}; }
    static WeightFamily log_power(double theta) { return {Kind::LogPower, theta}; }

    double weight(Index n) const;

    /// True when sum 1/(k b(k)) converges (the |a_n| ~ C n^alpha route);
    /// false for the slowly growing weights (envelope route).
    bool inverse_sum_converges() const;

    /// "log", "loglog", "power:r", "logpower:theta".
    std::string name() const;

    friend bool operator==(const WeightFamily&, const WeightFamily&) = default;
};

/// Parses the names produced by WeightFamily::name(). Throws std::invalid_argument.
WeightFamily parse_weight_family(std::string_view text);

} // namespace rvs
