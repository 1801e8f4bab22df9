#include "impdet/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace impdet {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_mask(std::span<const Complex> samples, std::span<const std::uint8_t> mask) {
    if (samples.size() != mask.size()) throw std::invalid_argument("mask length does not match sample count");
}

}  // namespace

ComplexVec blank(std::span<const Complex> samples, std::span<const std::uint8_t> mask) {
    check_mask(samples, mask);
    ComplexVec out(samples.begin(), samples.end());
    for (std::size_t k = 0; k < out.size(); ++k)
        if (mask[k]) out[k] = 0.0;
    return out;
}

ComplexVec clip(std::span<const Complex> samples, std::span<const std::uint8_t> mask, double level) {
    check_mask(samples, mask);
    if (!(level > 0.0)) throw std::invalid_argument("clip: level must be > 0");
    ComplexVec out(samples.begin(), samples.end());
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!mask[k]) continue;
        const double a = std::abs(out[k]);
        if (a > level) out[k] *= level / a;
    }
    return out;
}

double np_threshold(double sigma2_clean, double p_fa) {
    if (!(sigma2_clean > 0.0)) throw std::invalid_argument("np_threshold: sigma2_clean must be > 0");
    if (!(p_fa > 0.0 && p_fa < 1.0)) throw std::invalid_argument("np_threshold: p_fa must be in (0,1)");
    return std::sqrt(-sigma2_clean * std::log(p_fa));
}

double robust_power(std::span<const Complex> samples) {
    if (samples.empty()) throw std::invalid_argument("robust_power: empty block");
    std::vector<double> p(samples.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(samples[k]);
    auto mid = p.begin() + static_cast<std::ptrdiff_t>(p.size() / 2);
    std::nth_element(p.begin(), mid, p.end());
    return *mid / std::numbers::ln2;
}

Mask threshold_detect(std::span<const Complex> samples, double threshold) {
    Mask mask(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) mask[k] = std::abs(samples[k]) > threshold ? 1 : 0;
    return mask;
}

namespace {

double block_threshold(std::span<const Complex> samples, double p_fa) {
    const double power = robust_power(samples);
    // An all-zero block has nothing to flag.
    if (!(power > 0.0)) return std::numeric_limits<double>::infinity();
    return np_threshold(power, p_fa);
}

}  // namespace

void MitigationPolicy::validate() const {
    std::visit(overloaded{
                   [](const NoDetector&) {},
                   [](const ThresholdDetector& d) {
                       if (d.threshold && !(*d.threshold > 0.0)) throw std::invalid_argument("threshold must be > 0");
                       if (!(d.p_fa > 0.0 && d.p_fa < 1.0)) throw std::invalid_argument("p_fa must be in (0,1)");
                   },
                   [](const DnnDetector& d) {
                       if (!d.model) throw std::invalid_argument("dnn detector requires a model");
                       if (d.half_window == 0) throw std::invalid_argument("dnn detector half window must be >= 1");
                   },
               },
               detector);
    if (const auto* c = std::get_if<Clip>(&suppressor)) {
        if (c->level && !(*c->level > 0.0)) throw std::invalid_argument("clip level must be > 0");
        if (!(c->clip_p_fa > 0.0 && c->clip_p_fa < 1.0)) throw std::invalid_argument("clip p_fa must be in (0,1)");
    }
}

Mask detect(std::span<const Complex> samples, const Detector& detector) {
    return std::visit(overloaded{
                          [&](const NoDetector&) { return Mask(samples.size(), 0); },
                          [&](const ThresholdDetector& d) {
                              const double t = d.threshold ? *d.threshold : block_threshold(samples, d.p_fa);
                              return threshold_detect(samples, t);
                          },
                          [&](const DnnDetector& d) {
                              if (!d.model) throw std::invalid_argument("dnn detector requires a model");
                              return classify(*d.model, extract_features(samples, d.half_window), d.decision);
                          },
                      },
                      detector);
}

Mitigated mitigate(std::span<const Complex> samples, const MitigationPolicy& policy) {
    Mitigated out;
    out.mask = detect(samples, policy.detector);
    out.samples = std::visit(overloaded{
                                 [&](const Blank&) { return blank(samples, out.mask); },
                                 [&](const Clip& c) {
                                     const double level = c.level ? *c.level : block_threshold(samples, c.clip_p_fa);
                                     return clip(samples, out.mask, level);
                                 },
                             },
                             policy.suppressor);
    return out;
}

MitigationPolicy make_policy(const std::string& name, std::shared_ptr<const MlpParams> model, double p_fa) {
    if (name == "none") return {name, NoDetector{}, Blank{}};
    if (name == "blank") return {name, ThresholdDetector{std::nullopt, p_fa}, Blank{}};
    if (name == "clip") return {name, ThresholdDetector{std::nullopt, p_fa}, Clip{std::nullopt, p_fa}};
    if (name == "dnn") {
        if (!model) throw std::invalid_argument("policy 'dnn' requires a model");
        return {name, DnnDetector{std::move(model)}, Blank{}};
    }
    if (name == "dnn-clip") {
        if (!model) throw std::invalid_argument("policy 'dnn-clip' requires a model");
        return {name, DnnDetector{std::move(model)}, Clip{std::nullopt, p_fa}};
    }
    throw std::invalid_argument("unknown policy '" + name + "' (expected none, blank, clip, dnn, dnn-clip)");
}

}  // namespace impdet
