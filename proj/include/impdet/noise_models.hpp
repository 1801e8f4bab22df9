#pragma once

// Impulsive noise generators: Bernoulli-Gaussian, Middleton Class A,
// symmetric alpha-stable and bursty Bernoulli-Gaussian.
//
// All variances are total complex power (E|n|^2), in linear units.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "impdet/rng.hpp"
#include "impdet/types.hpp"

namespace impdet {

struct BgParams {
    double epsilon = 0.0;   ///< impulse probability
    double sigma_w2 = 1.0;  ///< background (AWGN) variance
    double sigma_i2 = 1.0;  ///< impulse variance added on top of the background
};

struct McaParams {
    double A = 1.0;         ///< impulsiveness index
    double Gamma = 0.2;     ///< background-to-impulse power ratio
    double sigma_n2 = 1.0;  ///< total noise variance
    int terms = 10;         ///< truncation order (components j = 0..terms-1)
};

struct SasParams {
    double alpha = 1.5;  ///< stability, (0, 2]
    double beta = 0.0;   ///< skewness, [-1, 1]
    double gamma = 1.0;  ///< scale (dispersion)
    double mu = 0.0;     ///< location, applied to the real part
};

using NoiseSpec = std::variant<BgParams, McaParams, SasParams>;

class UnsupportedVariant : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class TruncationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Discrete Gaussian mixture: weights[j] and variances[j] of CN(0, variances[j]).
struct Mixture {
    std::vector<double> weights;
    std::vector<double> variances;
};

struct LabeledNoiseBlock {
    ComplexVec samples;
    /// Absent for alpha-stable noise, which has no mixture ground truth.
    std::optional<Mask> labels;
    /// Impulsive part of each sample (samples minus the background Gaussian
    /// term). Empty for alpha-stable noise.
    ComplexVec impulsive;
    NoiseSpec spec;
    std::uint64_t seed = 0;

    const Mask& require_labels() const;
};

/// Minimum probability mass the truncated Class A series must retain.
inline constexpr double kMinTruncatedMass = 0.999;

/// Class A component j before renormalization: (p_j, sigma_j^2).
std::pair<double, double> mca_component(double A, double Gamma, double sigma_n2, int j);

/// Mixture weights/variances for BG or MCA. MCA weights are renormalized after
/// truncation; throws TruncationError when the retained mass is below
/// kMinTruncatedMass, UnsupportedVariant for alpha-stable specs.
Mixture mixture_components(const NoiseSpec& spec);

/// Density of the complex noise sample x under a BG or MCA spec.
double mixture_pdf(const NoiseSpec& spec, Complex x);

/// Throws std::invalid_argument on out-of-range parameters.
void validate(const NoiseSpec& spec);

std::string describe(const NoiseSpec& spec);

LabeledNoiseBlock sample_bg(const BgParams& p, std::size_t count, Rng& rng);
LabeledNoiseBlock sample_mca(const McaParams& p, std::size_t count, Rng& rng);
LabeledNoiseBlock sample_sas(const SasParams& p, std::size_t count, Rng& rng);

/// Bernoulli-Gaussian impulses arriving in runs of exactly `burst_len`
/// samples with a marginal contamination rate of p.epsilon. For
/// burst_len >= 2 consecutive bursts are separated by at least one clean
/// sample; burst_len == 1 is identical to sample_bg. A burst that would
/// run past the block end is truncated.
LabeledNoiseBlock sample_bursty(const BgParams& p, std::size_t burst_len, std::size_t count, Rng& rng);

/// Per-position burst start probability giving marginal rate epsilon.
double burst_start_probability(double epsilon, std::size_t burst_len);

/// Single real standard-form stable variate S(alpha, beta, 1, 0) via the
/// Chambers-Mallows-Stuck transform.
double stable_standard(double alpha, double beta, Rng& rng);

/// Dispatching sampler; seeds a fresh generator and records the seed.
LabeledNoiseBlock sample_noise(const NoiseSpec& spec, std::size_t count, std::uint64_t seed);

}  // namespace impdet
