#pragma once

#include <algorithm>

namespace reach {

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
};

// Moves [old.lower, old.upper] towards a freshly computed pair without ever
// lowering L, raising U, or letting them cross.
inline Interval tighten(Interval old, double raw_lower, double raw_upper) {
    raw_lower = std::clamp(raw_lower, 0.0, 1.0);
    raw_upper = std::clamp(raw_upper, 0.0, 1.0);
    Interval out;
    out.lower = std::max(old.lower, std::min(raw_lower, old.upper));
    out.upper = std::min(old.upper, std::max(raw_upper, out.lower));
    return out;
}

}  // namespace reach
