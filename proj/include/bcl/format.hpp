#pragma once

#include <string>

namespace bcl {

/// Shortest-round-trip-safe text for a double: 17 significant digits, '.'
/// decimal point, independent of the global locale. Non-finite values print
/// as "nan", "inf" and "-inf".
std::string format_real(double value);

}  // namespace bcl
