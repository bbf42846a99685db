#pragma once

#include <string>

namespace pinn {

/// Shortest decimal rendering that round-trips the exact double
/// (std::to_chars). Deterministic, locale-independent, '.' decimal point.
std::string format_double(double v);

}  // namespace pinn
