#include "impdet/noise_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace impdet {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

// Draws the component index from cumulative weights with u in [0,1).
std::size_t pick_component(const std::vector<double>& cumulative, double u) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) return cumulative.size() - 1;
    return static_cast<std::size_t>(it - cumulative.begin());
}

LabeledNoiseBlock sample_mixture(const Mixture& mix, const NoiseSpec& spec, std::size_t count, Rng& rng) {
    std::vector<double> cumulative(mix.weights.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < mix.weights.size(); ++j) {
        acc += mix.weights[j];
        cumulative[j] = acc;
    }
    const double background = mix.variances.front();

    LabeledNoiseBlock out;
    out.spec = spec;
    out.samples.resize(count);
    out.impulsive.resize(count);
    Mask labels(count);
    for (std::size_t k = 0; k < count; ++k) {
        // Every sample consumes the same draws regardless of the component.
        const double u = uniform01(rng);
        const Complex w = complex_normal(rng, background);
        const Complex unit = complex_normal(rng, 1.0);
        const std::size_t j = pick_component(cumulative, u * acc);
        const double excess = mix.variances[j] - background;
        const Complex i = excess > 0.0 ? unit * std::sqrt(excess) : Complex{};
        labels[k] = j >= 1 ? 1 : 0;
        out.impulsive[k] = i;
        out.samples[k] = w + i;
    }
    out.labels = std::move(labels);
    return out;
}

}  // namespace

const Mask& LabeledNoiseBlock::require_labels() const {
    if (!labels) throw UnsupportedVariant("noise block has no ground-truth labels (alpha-stable noise)");
    return *labels;
}

std::pair<double, double> mca_component(double A, double Gamma, double sigma_n2, int j) {
    require(A > 0.0 && Gamma > 0.0 && sigma_n2 > 0.0 && j >= 0, "mca_component: parameters out of range");
    const double log_p = -A + j * std::log(A) - std::lgamma(j + 1.0);
    const double var = (j / A + Gamma) / (1.0 + Gamma) * sigma_n2;
    return {std::exp(log_p), var};
}

void validate(const NoiseSpec& spec) {
    std::visit(overloaded{
                   [](const BgParams& p) {
                       require(p.epsilon >= 0.0 && p.epsilon <= 1.0, "BG: epsilon must be in [0,1]");
                       require(p.sigma_w2 > 0.0, "BG: sigma_w2 must be > 0");
                       require(p.sigma_i2 > 0.0, "BG: sigma_i2 must be > 0");
                   },
                   [](const McaParams& p) {
                       require(p.A > 0.0, "MCA: A must be > 0");
                       require(p.Gamma > 0.0, "MCA: Gamma must be > 0");
                       require(p.sigma_n2 > 0.0, "MCA: sigma_n2 must be > 0");
                       require(p.terms >= 1, "MCA: truncation order must be >= 1");
                   },
                   [](const SasParams& p) {
                       require(p.alpha > 0.0 && p.alpha <= 2.0, "SaS: alpha must be in (0,2]");
                       require(p.beta >= -1.0 && p.beta <= 1.0, "SaS: beta must be in [-1,1]");
                       require(p.gamma > 0.0, "SaS: gamma must be > 0");
                       require(std::isfinite(p.mu), "SaS: mu must be finite");
                   },
               },
               spec);
}

Mixture mixture_components(const NoiseSpec& spec) {
    validate(spec);
    return std::visit(overloaded{
                          [](const BgParams& p) {
                              return Mixture{{1.0 - p.epsilon, p.epsilon}, {p.sigma_w2, p.sigma_w2 + p.sigma_i2}};
                          },
                          [](const McaParams& p) {
                              Mixture m;
                              double mass = 0.0;
                              for (int j = 0; j < p.terms; ++j) {
                                  auto [pj, vj] = mca_component(p.A, p.Gamma, p.sigma_n2, j);
                                  m.weights.push_back(pj);
                                  m.variances.push_back(vj);
                                  mass += pj;
                              }
                              if (mass < kMinTruncatedMass) {
                                  std::ostringstream os;
                                  os << "MCA: truncation to " << p.terms << " terms keeps mass " << mass << " < "
                                     << kMinTruncatedMass << " for A=" << p.A;
                                  throw TruncationError(os.str());
                              }
                              for (auto& w : m.weights) w /= mass;
                              return m;
                          },
                          [](const SasParams&) -> Mixture {
                              throw UnsupportedVariant("alpha-stable noise is not a Gaussian mixture");
                          },
                      },
                      spec);
}

double mixture_pdf(const NoiseSpec& spec, Complex x) {
    const Mixture m = mixture_components(spec);
    const double r2 = std::norm(x);
    double pdf = 0.0;
    for (std::size_t j = 0; j < m.weights.size(); ++j) {
        if (m.weights[j] == 0.0) continue;
        const double v = m.variances[j];
        pdf += m.weights[j] * std::exp(-r2 / v) / (std::numbers::pi * v);
    }
    return pdf;
}

std::string describe(const NoiseSpec& spec) {
    std::ostringstream os;
    os.precision(6);
    std::visit(overloaded{
                   [&](const BgParams& p) {
                       os << "bg(epsilon=" << p.epsilon << ",sigma_w2=" << p.sigma_w2 << ",sigma_i2=" << p.sigma_i2 << ")";
                   },
                   [&](const McaParams& p) {
                       os << "mca(A=" << p.A << ",Gamma=" << p.Gamma << ",sigma_n2=" << p.sigma_n2 << ",terms=" << p.terms
                          << ")";
                   },
                   [&](const SasParams& p) {
                       os << "sas(alpha=" << p.alpha << ",beta=" << p.beta << ",gamma=" << p.gamma << ",mu=" << p.mu << ")";
                   },
               },
               spec);
    return os.str();
}

LabeledNoiseBlock sample_bg(const BgParams& p, std::size_t count, Rng& rng) {
    const NoiseSpec spec = p;
    return sample_mixture(mixture_components(spec), spec, count, rng);
}

LabeledNoiseBlock sample_mca(const McaParams& p, std::size_t count, Rng& rng) {
    const NoiseSpec spec = p;
    return sample_mixture(mixture_components(spec), spec, count, rng);
}

double stable_standard(double alpha, double beta, Rng& rng) {
    require(alpha > 0.0 && alpha <= 2.0, "SaS: alpha must be in (0,2]");
    require(beta >= -1.0 && beta <= 1.0, "SaS: beta must be in [-1,1]");
    constexpr double half_pi = std::numbers::pi / 2.0;
    double u = 0.0;
    do {
        u = std::numbers::pi * (uniform01(rng) - 0.5);
    } while (u <= -half_pi);
    double w = 0.0;
    do {
        w = -std::log(1.0 - uniform01(rng));
    } while (w == 0.0);

    if (alpha == 1.0) {
        const double t = half_pi + beta * u;
        return (t * std::tan(u) - beta * std::log(half_pi * w * std::cos(u) / t)) / half_pi;
    }
    const double zeta = -beta * std::tan(half_pi * alpha);
    const double xi = std::atan(-zeta) / alpha;
    const double a = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * alpha));
    const double b = std::sin(alpha * (u + xi)) / std::pow(std::cos(u), 1.0 / alpha);
    const double c = std::pow(std::cos(u - alpha * (u + xi)) / w, (1.0 - alpha) / alpha);
    return a * b * c;
}

LabeledNoiseBlock sample_sas(const SasParams& p, std::size_t count, Rng& rng) {
    validate(p);
    // S(alpha, beta, gamma, mu) = gamma * S(alpha, beta, 1, 0) + shift
    double shift = p.mu;
    if (p.alpha == 1.0) shift += 2.0 / std::numbers::pi * p.beta * p.gamma * std::log(p.gamma);
    const double shift_im = shift - p.mu;

    LabeledNoiseBlock out;
    out.spec = p;
    out.samples.resize(count);
    for (auto& s : out.samples) {
        const double re = p.gamma * stable_standard(p.alpha, p.beta, rng) + shift;
        const double im = p.gamma * stable_standard(p.alpha, p.beta, rng) + shift_im;
        s = {re, im};
    }
    return out;
}

double burst_start_probability(double epsilon, std::size_t burst_len) {
    require(burst_len >= 1, "burst length must be >= 1");
    require(epsilon >= 0.0 && epsilon < 1.0, "bursty: epsilon must be in [0,1)");
    if (burst_len == 1) return epsilon;
    // Renewal cycle: burst (len) + guard (1) + geometric idle run with mean (1-q)/q.
    // Marginal rate len / (len + 1 + (1-q)/q) = epsilon.
    const double n = static_cast<double>(burst_len);
    return epsilon / (n * (1.0 - epsilon));
}

LabeledNoiseBlock sample_bursty(const BgParams& p, std::size_t burst_len, std::size_t count, Rng& rng) {
    const NoiseSpec spec = p;
    validate(spec);
    if (burst_len == 1) return sample_bg(p, count, rng);
    const double q = burst_start_probability(p.epsilon, burst_len);
    require(q <= 1.0, "bursty: epsilon too large for the burst length");

    LabeledNoiseBlock out;
    out.spec = p;
    out.samples.resize(count);
    out.impulsive.resize(count);
    Mask labels(count, 0);
    std::size_t k = 0;
    while (k < count) {
        if (uniform01(rng) < q) {
            const std::size_t end = std::min(count, k + burst_len);
            for (; k < end; ++k) labels[k] = 1;
            ++k;  // guard sample stays clean
        } else {
            ++k;
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        const Complex w = complex_normal(rng, p.sigma_w2);
        const Complex unit = complex_normal(rng, 1.0);
        const Complex imp = labels[i] ? unit * std::sqrt(p.sigma_i2) : Complex{};
        out.impulsive[i] = imp;
        out.samples[i] = w + imp;
    }
    out.labels = std::move(labels);
    return out;
}

LabeledNoiseBlock sample_noise(const NoiseSpec& spec, std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    LabeledNoiseBlock out = std::visit(
        overloaded{
            [&](const BgParams& p) { return sample_bg(p, count, rng); },
            [&](const McaParams& p) { return sample_mca(p, count, rng); },
            [&](const SasParams& p) { return sample_sas(p, count, rng); },
        },
        spec);
    out.seed = seed;
    return out;
}

}  // namespace impdet
