#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "impdet/types.hpp"

namespace impdet {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic substream seed from a master seed and a path of indices
/// (e.g. {grid_point, trial}). Distinct paths give decorrelated seeds.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Draw from CN(0, variance): real and imaginary parts each N(0, variance/2).
Complex complex_normal(Rng& rng, double variance);

/// Uniform in [0, 1).
double uniform01(Rng& rng);

}  // namespace impdet
