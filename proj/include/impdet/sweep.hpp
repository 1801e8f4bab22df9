#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "impdet/config.hpp"
#include "impdet/link.hpp"
#include "impdet/mitigation.hpp"

namespace impdet {

struct BerPoint {
    double ebn0_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    bool budget_exhausted = false;  ///< max_bits reached before min_errors
    std::uint64_t trials = 0;       ///< OFDM symbols simulated (0 when read from a file)
    double sum_sq_errors = 0.0;     ///< sum over trials of (errors in the trial)^2

    double ber() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }

    /// Standard error of ber() from the spread of per-symbol error counts.
    /// NaN with fewer than 2 trials.
    double ber_se() const;
};

struct BerCurve {
    std::string detector;
    std::vector<BerPoint> points;  ///< sorted by Eb/N0
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string noise;
};

/// Monte Carlo BER for every policy over cfg.ebn0_db. Trial t uses the seed
/// derive_seed(cfg.seed, {t}) at every grid point, and each trial's received
/// block is decoded by all policies. A point stops once every policy has
/// min_errors errors or max_bits bits have been simulated.
std::vector<BerCurve> ber_sweep(const ExperimentConfig& cfg, const std::vector<MitigationPolicy>& policies);

/// Policies named in cfg.policies; loads cfg.model_path when a DNN policy is listed.
std::vector<MitigationPolicy> policies_from_config(const ExperimentConfig& cfg);

/// `ebn0_db,detector,ber,bits,errors` with '#' metadata lines.
void write_curve_csv(std::ostream& os, const BerCurve& curve);
void write_curve_csv(const std::string& path, const BerCurve& curve);
BerCurve read_curve_csv(std::istream& is);
BerCurve read_curve_csv(const std::string& path);

/// Wide table `ebn0_db,<detector>...` over the union of grid points; missing
/// entries are left empty.
void write_plot_table(std::ostream& os, const std::vector<BerCurve>& curves);

/// Eb/N0 at which the curve crosses `target`, interpolated linearly in
/// log10(BER). NaN when the curve never crosses.
double ebn0_at_ber(const BerCurve& curve, double target);

}  // namespace impdet
