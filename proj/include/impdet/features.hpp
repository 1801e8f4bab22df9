#pragma once

// Per-sample detector inputs: magnitude, rank-ordered absolute differences
// (ROAD) and median deviation, computed over a sliding window of 2n+1
// samples with reflected boundaries.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "impdet/types.hpp"

namespace impdet {

struct FeatureVector {
    double magnitude = 0.0;   ///< |r_k|
    double road = 0.0;        ///< sum of the n smallest |r_k - r_j| over the window
    double median_dev = 0.0;  ///< | |r_k| - median(|r_j|) |

    std::array<double, 3> as_array() const { return {magnitude, road, median_dev}; }
};

inline constexpr std::size_t kDefaultHalfWindow = 5;

/// ROAD statistic of the centre sample of a (2n+1)-sample window.
double road(std::span<const Complex> window);

/// Signed median deviation m_c - median(m) on magnitudes m of a (2n+1) window.
double median_deviation(std::span<const Complex> window);

/// Reflect an out-of-range index into [0, len) without repeating the edge
/// sample (..., 2, 1, 0, 1, 2, ...).
std::size_t reflect_index(std::ptrdiff_t i, std::size_t len);

/// One feature vector per sample. half_window = n.
std::vector<FeatureVector> extract_features(std::span<const Complex> samples, std::size_t half_window = kDefaultHalfWindow);

/// Per-feature z-score constants.
struct Normalizer {
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    std::array<double, 3> stddev{1.0, 1.0, 1.0};
};

inline constexpr double kStdFloor = 1e-12;

Normalizer fit_normalizer(std::span<const FeatureVector> features);
std::array<double, 3> apply_normalizer(const FeatureVector& fv, const Normalizer& norm);

}  // namespace impdet
