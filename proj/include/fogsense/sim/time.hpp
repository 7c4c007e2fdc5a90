#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace fogsense::sim {

/// Durations are plain integer milliseconds.
using Millis = std::int64_t;

/// Simulated clock value: integer milliseconds since simulation start.
class SimTime {
public:
    constexpr SimTime() = default;
    constexpr explicit SimTime(Millis ms) : ms_(ms) {}

    [[nodiscard]] constexpr Millis ms() const { return ms_; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(Millis d) const { return SimTime{ms_ + d}; }
    constexpr SimTime operator-(Millis d) const { return SimTime{ms_ - d}; }
    constexpr Millis operator-(SimTime other) const { return ms_ - other.ms_; }
    constexpr SimTime& operator+=(Millis d) {
        ms_ += d;
        return *this;
    }

private:
    Millis ms_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, SimTime t) { return os << t.ms() << "ms"; }

}  // namespace fogsense::sim
