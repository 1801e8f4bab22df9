#pragma once

#include <span>

#include "impdet/types.hpp"

namespace impdet {

/// Unitary DFT (1/sqrt(N) scaling in both directions). Thread-safe; plans are
/// cached per (size, direction).
ComplexVec dft(std::span<const Complex> in);
ComplexVec idft(std::span<const Complex> in);

}  // namespace impdet
