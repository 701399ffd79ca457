#pragma once

#include <string>

namespace ddm {

// Fixed-precision text form used by every artifact writer; 1e-12 resolution,
// '.' decimal separator, no locale dependence.
std::string format_double(double value);

// Rounds to the same 1e-12 resolution before a value enters a JSON document.
double round_artifact(double value);

}  // namespace ddm
