#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace impdet {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

/// One bit per byte, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

/// Per-sample binary flags (1 = impulse present / sample flagged).
using Mask = std::vector<std::uint8_t>;

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace impdet
