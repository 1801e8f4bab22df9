#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "impdet/rng.hpp"
#include "impdet/types.hpp"

namespace impdet {

inline constexpr std::uint64_t kPilotSeed = 0x50494C4F54ULL;

/// Subcarrier partition and framing of one OFDM symbol.
struct OfdmConfig {
    std::size_t fft_size = 1024;
    std::vector<std::size_t> data;    ///< S_D, ascending
    std::vector<std::size_t> pilots;  ///< S_P, ascending
    std::vector<std::size_t> nulls;   ///< S_N, ascending
    std::size_t cp_len = 64;
    std::vector<Complex> pilot_symbols;  ///< one known symbol per entry of S_P

    /// 1024 carriers: 256 pilots on every 4th carrier starting at 0, 96 nulls
    /// (the non-pilot carriers in [448, 576), i.e. around Nyquist), 672 data.
    /// Pilot symbols are a fixed pseudo-random QPSK sequence (kPilotSeed).
    static OfdmConfig standard(std::size_t cp_len = 64);

    /// Same value on every pilot carrier.
    void set_constant_pilots(Complex value);

    /// Throws std::invalid_argument when the sets do not partition 0..N-1.
    void validate() const;

    std::size_t symbol_len() const { return fft_size + cp_len; }
    /// S_A = S_D u S_P, ascending.
    std::vector<std::size_t> active() const;
};

/// Gray-mapped unit-energy QPSK: bit pair (b0, b1) -> ((1-2 b0) + j (1-2 b1)) / sqrt(2).
ComplexVec qpsk_map(std::span<const std::uint8_t> bits);

/// LLR = log P(b=0)/P(b=1) for each bit under CN(0, noise_var) noise; two per
/// symbol. Positive LLR means bit 0.
std::vector<double> qpsk_llr(std::span<const Complex> symbols, double noise_var);

/// Per-symbol noise variances; entries that are not finite or not positive
/// mark erased symbols and yield zero LLRs.
std::vector<double> qpsk_llr(std::span<const Complex> symbols, std::span<const double> noise_var);

/// Places data symbols on S_D and the pilot symbols on S_P; returns one value
/// per active carrier in ascending carrier order.
ComplexVec assemble_active(const OfdmConfig& cfg, std::span<const Complex> data_symbols);

/// Inverse unitary DFT over the active carriers (nulls zero) with cyclic
/// prefix prepended. Output length N + cp_len.
ComplexVec ofdm_modulate(const OfdmConfig& cfg, std::span<const Complex> active_symbols);

/// Drops the cyclic prefix and applies the forward unitary DFT. Returns all N
/// carriers.
ComplexVec ofdm_demodulate(const OfdmConfig& cfg, std::span<const Complex> samples);

std::vector<Complex> gather(std::span<const Complex> grid, std::span<const std::size_t> carriers);

struct ChannelTap {
    Complex gain;
    std::size_t delay = 0;
};

struct ChannelRealization {
    std::vector<ChannelTap> taps;

    std::size_t max_delay() const;
    /// H[k] = sum_p b_p exp(-j 2 pi k tau_p / N), matching the unitary DFT convention.
    ComplexVec frequency_response(std::size_t fft_size) const;
};

struct ChannelProfile {
    std::size_t taps = 10;
    double mean_arrival = 6.0;  ///< mean inter-arrival time, samples
    double decay = 16.0;        ///< power-delay-profile e-folding constant, samples
    std::size_t max_delay = 63; ///< delays must not exceed this (cp_len - 1)
    int max_retries = 1000;
};

/// Rayleigh multipath: first path at delay 0, exponential inter-arrivals
/// rounded to whole samples (at least one), tap gains CN(0, w_p) with
/// w_p proportional to exp(-tau_p / decay) and sum_p w_p = 1.
ChannelRealization channel_generate(const ChannelProfile& profile, Rng& rng);

/// Average power profile w_p for the given delays (sums to 1).
std::vector<double> power_profile(std::span<const std::size_t> delays, double decay);

/// Linear convolution with the sparse taps, truncated to the input length.
ComplexVec channel_apply(std::span<const Complex> signal, const ChannelRealization& ch);

/// Least-squares pilot estimate with linear interpolation between pilots
/// and linear extrapolation past the outermost ones. `rx_grid` holds all N
/// demodulated carriers; the result covers all N.
ComplexVec estimate_channel(const OfdmConfig& cfg, std::span<const Complex> rx_grid,
                            std::span<const Complex> pilot_symbols);
ComplexVec estimate_channel(const OfdmConfig& cfg, std::span<const Complex> rx_grid, Complex pilot_value);
/// Uses cfg.pilot_symbols.
ComplexVec estimate_channel(const OfdmConfig& cfg, std::span<const Complex> rx_grid);

struct Equalized {
    ComplexVec symbols;
    std::vector<double> noise_scale;  ///< 1/|H|^2, +inf for erased carriers
    Mask erased;
};

inline constexpr double kChannelFloor = 1e-6;

/// Zero-forcing equalization. Carriers with |H| < kChannelFloor are erased.
Equalized equalize(std::span<const Complex> symbols, std::span<const Complex> H);

}  // namespace impdet
