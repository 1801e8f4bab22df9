#pragma once

// Memoryless impulse suppressors and the detectors that drive them. A
// detector only produces a mask; a suppressor only consumes one.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "impdet/dnn.hpp"
#include "impdet/features.hpp"
#include "impdet/types.hpp"

namespace impdet {

/// r_k -> 0 where mask_k = 1.
ComplexVec blank(std::span<const Complex> samples, std::span<const std::uint8_t> mask);

/// Flagged samples with |r_k| > level are scaled to magnitude `level`, phase
/// kept; flagged samples already within the level pass unchanged.
ComplexVec clip(std::span<const Complex> samples, std::span<const std::uint8_t> mask, double level);

/// Envelope threshold with false-alarm probability p_fa for a Rayleigh
/// envelope of total power sigma2_clean: sqrt(-sigma2_clean * ln p_fa).
double np_threshold(double sigma2_clean, double p_fa);

/// Clean-power estimate median(|r|^2) / ln 2, insensitive to a minority of impulses.
double robust_power(std::span<const Complex> samples);

/// mask_k = 1 iff |r_k| > T.
Mask threshold_detect(std::span<const Complex> samples, double threshold);

struct NoDetector {};

struct ThresholdDetector {
    /// Fixed threshold; when unset, np_threshold(robust_power(block), p_fa).
    std::optional<double> threshold;
    double p_fa = 0.01;
};

struct DnnDetector {
    std::shared_ptr<const MlpParams> model;
    std::size_t half_window = kDefaultHalfWindow;
    double decision = kDecisionThreshold;
};

using Detector = std::variant<NoDetector, ThresholdDetector, DnnDetector>;

struct Blank {};
struct Clip {
    /// When unset, the Neyman-Pearson threshold of the block at clip_p_fa.
    std::optional<double> level;
    double clip_p_fa = 0.01;
};

using Suppressor = std::variant<Blank, Clip>;

struct MitigationPolicy {
    std::string name;
    Detector detector;
    Suppressor suppressor;

    void validate() const;
};

Mask detect(std::span<const Complex> samples, const Detector& detector);

struct Mitigated {
    ComplexVec samples;
    Mask mask;
};

Mitigated mitigate(std::span<const Complex> samples, const MitigationPolicy& policy);

/// Conventional policies: "none", "blank", "clip" (threshold detector at p_fa,
/// clip at the detection threshold) and "dnn" (model + blanking).
MitigationPolicy make_policy(const std::string& name, std::shared_ptr<const MlpParams> model = nullptr,
                             double p_fa = 0.01);

}  // namespace impdet
