#pragma once

// End-to-end coded OFDM link: encode -> bit interleave -> QPSK -> OFDM ->
// multipath -> AWGN + impulsive noise -> mitigation -> DFT -> channel
// estimation / ZF equalization -> LLR -> deinterleave -> Viterbi.
//
// Energy conventions (linear units):
//   * Average transmitted sample power P_s = |S_A| / N (unit-energy symbols,
//     unitary IDFT); channel taps have unit total average power.
//   * Eb is the transmitted energy of one OFDM symbol body (|S_A|) divided by
//     the information bits it carries, so Eb/N0 absorbs the code rate, tail
//     bits, pilots and nulls. N0 equals the background variance sigma_w^2.
//   * SIR = P_s / (average impulsive power); for BG that power is epsilon * sigma_i^2.

#include <cstdint>
#include <utility>

#include "impdet/coding.hpp"
#include "impdet/config.hpp"
#include "impdet/mitigation.hpp"
#include "impdet/noise_models.hpp"
#include "impdet/ofdm_phy.hpp"

namespace impdet {

/// Noise parameters at one operating point.
struct OperatingPoint {
    double ebn0_db = 10.0;
    NoiseKind noise = NoiseKind::Bg;
    double epsilon = 0.05;
    double sir_db = 0.0;
};

struct ReceivedBlock {
    Bits tx_bits;
    ChannelRealization channel;
    ComplexVec clean;      ///< channel output without noise, N + cp_len samples
    ComplexVec rx;         ///< clean + noise
    ComplexVec impulsive;  ///< impulsive noise component (empty for alpha-stable)
    Mask labels;           ///< ground truth; empty when the noise has none
    double sigma_w2 = 0.0;
};

class LinkSimulator {
public:
    explicit LinkSimulator(ExperimentConfig cfg);

    const ExperimentConfig& config() const { return cfg_; }
    const OfdmConfig& ofdm() const { return ofdm_; }

    std::size_t info_bits() const { return info_bits_; }
    std::size_t coded_bits() const { return coded_bits_; }
    double signal_power() const { return signal_power_; }

    /// sigma_w^2 for an Eb/N0 in dB.
    double background_variance(double ebn0_db) const;

    /// Noise model at an operating point (alpha-stable scale already applied).
    NoiseSpec noise_spec(const OperatingPoint& op) const;

    /// The operating point described by the config at the given Eb/N0.
    OperatingPoint operating_point(double ebn0_db) const;

    /// Transmit one OFDM symbol and pass it through channel and noise. The
    /// bit, channel and noise streams are derived from `trial_seed`
    /// separately, so any two operating points see the same bits and channel.
    ReceivedBlock transmit(const OperatingPoint& op, std::uint64_t trial_seed) const;

    /// Receiver chain for one policy; returns decoded information bits.
    Bits receive(const ReceivedBlock& block, const MitigationPolicy& policy) const;

private:
    LabeledNoiseBlock draw_noise(const OperatingPoint& op, std::uint64_t seed) const;

    ExperimentConfig cfg_;
    OfdmConfig ofdm_;
    ChannelProfile profile_;
    BlockInterleaver bit_il_;
    BlockInterleaver time_il_;
    std::size_t info_bits_ = 0;
    std::size_t coded_bits_ = 0;
    double signal_power_ = 0.0;
};

/// One symbol through the link for a single policy; returns (tx, decoded) bits.
std::pair<Bits, Bits> run_link_once(const ExperimentConfig& cfg, const MitigationPolicy& policy, Rng& rng);

std::uint64_t count_bit_errors(const Bits& a, const Bits& b);

}  // namespace impdet
