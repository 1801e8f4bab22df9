#pragma once

// Experiment configuration: a flat `key = value` text format.
//
//   # comment
//   noise = bg
//   epsilon = 0.05
//   ebn0_db = 0:2:20        # start:step:stop, or a comma list "0,2,4"
//   policies = none,blank,clip,dnn
//
// Unknown keys and malformed values raise ConfigError naming the key.
// Powers are given in dB here and converted to linear units on use.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "impdet/dnn.hpp"
#include "impdet/ofdm_phy.hpp"

namespace impdet {

class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& message)
        : std::invalid_argument("config key '" + key + "': " + message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class NoiseKind { Awgn, Bg, Mca, Sas, Bursty };

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& s);

struct ExperimentConfig {
    std::uint64_t seed = 1;

    // OFDM and channel
    std::size_t cp_len = 64;
    std::size_t channel_taps = 10;
    double mean_arrival = 6.0;  ///< samples; 1 ms at 6 kHz
    double decay = 16.0;        ///< samples
    bool perfect_csi = false;

    // Coding and interleaving
    bool bit_interleave = true;
    std::size_t bit_il_rows = 32;
    std::size_t bit_il_cols = 42;
    bool time_interleave = false;
    std::size_t time_il_rows = 32;
    std::size_t time_il_cols = 34;

    // Noise
    NoiseKind noise = NoiseKind::Bg;
    double epsilon = 0.05;
    double sir_db = 0.0;
    double mca_A = 1.0;
    double mca_Gamma = 0.2;
    int mca_terms = 10;
    double sas_alpha = 1.5;
    double sas_beta = 0.0;
    double sas_gamma = 1.0;
    double sas_mu = 0.0;
    /// Signal power over the Gaussian-equivalent power 4 gamma^2 of the
    /// alpha-stable term (its variance is infinite for alpha < 2).
    double sas_sir_db = 10.0;
    std::size_t burst_len = 1;

    // BER sweep
    std::vector<double> ebn0_db = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    std::vector<std::string> policies = {"none", "blank", "clip", "dnn"};
    std::string model_path;
    double p_fa = 0.01;
    double decision = kDecisionThreshold;
    std::size_t half_window = kDefaultHalfWindow;
    std::uint64_t min_errors = 200;
    std::uint64_t max_bits = 2'000'000;
    std::size_t batch_trials = 16;
    unsigned threads = 1;

    // Dataset and training
    NoiseKind train_noise = NoiseKind::Bg;
    std::size_t dataset_symbols = 1000;
    std::vector<double> train_ebn0_db = {0, 2, 4, 6, 8, 10, 12, 14};
    std::vector<double> train_sir_db = {-5, 0, 5};
    std::vector<double> train_epsilon = {0.01, 0.05, 0.1};
    TrainConfig train;

    /// Throws ConfigError on invalid combinations.
    void validate() const;

    /// Applies one `key = value` assignment.
    void set(const std::string& key, const std::string& value);

    /// Every key in a fixed order, one `key = value` per line.
    std::string canonical() const;

    /// FNV-1a 64 of canonical(), as 16 hex digits.
    std::string hash() const;

    OfdmConfig ofdm() const;
    ChannelProfile channel_profile() const;
};

/// Reads `key = value` lines (comments start with '#').
ExperimentConfig parse_config(std::istream& is, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// "a,b,c" or "start:step:stop" (inclusive).
std::vector<double> parse_grid(const std::string& key, const std::string& text);

std::vector<std::string> config_keys();

}  // namespace impdet
