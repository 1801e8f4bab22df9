#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "impdet/config.hpp"
#include "impdet/features.hpp"
#include "impdet/link.hpp"
#include "impdet/mitigation.hpp"

namespace impdet {

struct LabeledDataset {
    std::vector<FeatureVector> features;
    Mask labels;
    std::uint64_t seed = 0;
    std::string config_hash;

    double base_rate() const;
};

/// cfg.dataset_symbols OFDM symbols, each at an operating point drawn
/// uniformly from train_ebn0_db x train_sir_db x train_epsilon with noise
/// kind cfg.train_noise. Features are computed over the full received
/// symbol; cyclic-prefix rows are dropped, so the row count is
/// dataset_symbols * N. Rows are shuffled with a seed derived from cfg.seed.
LabeledDataset generate_dataset(const ExperimentConfig& cfg);

/// CSV: '#' metadata lines, header `x1,x2,x3,label`, then one row per sample.
void write_dataset_csv(std::ostream& os, const LabeledDataset& ds);
LabeledDataset read_dataset_csv(std::istream& is);
void write_dataset_csv(const std::string& path, const LabeledDataset& ds);
LabeledDataset read_dataset_csv(const std::string& path);

struct DetectionStats {
    std::uint64_t true_pos = 0;
    std::uint64_t false_pos = 0;
    std::uint64_t true_neg = 0;
    std::uint64_t false_neg = 0;

    std::uint64_t total() const { return true_pos + false_pos + true_neg + false_neg; }
    double detection_rate() const;    ///< P(flag | impulse)
    double false_alarm_rate() const;  ///< P(flag | clean)
    double missed_rate() const;       ///< P(no flag | impulse)
    double accuracy() const;
    /// Accuracy of always answering "clean".
    double all_clean_accuracy() const;

    DetectionStats& operator+=(const DetectionStats& o);
};

DetectionStats score_mask(const Mask& predicted, const Mask& truth);

/// Detector scored against ground truth on `symbols` received symbols at the
/// given operating point (cyclic prefix excluded).
DetectionStats evaluate_detector(const ExperimentConfig& cfg, const Detector& detector, const OperatingPoint& op,
                                 std::size_t symbols, std::uint64_t seed);

}  // namespace impdet
