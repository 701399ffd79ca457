#include "ddm/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace ddm {

double round_artifact(double value) {
    if (!std::isfinite(value)) return value;
    double scaled = value * 1e12;
    if (std::abs(scaled) > 9.0e15) return value;  // beyond exact integer range
    return std::nearbyint(scaled) / 1e12;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", round_artifact(value));
    return buf;
}

}  // namespace ddm
