#include "impdet/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace impdet {

namespace {

std::size_t half_width_of(std::span<const Complex> window) {
    if (window.size() < 3 || window.size() % 2 == 0)
        throw std::invalid_argument("window length must be 2n+1 with n >= 1");
    return window.size() / 2;
}

// Sum of the n smallest entries; reorders `d`.
double sum_smallest(std::vector<double>& d, std::size_t n) {
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n), d.end());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += d[i];
    return s;
}

double median_inplace(std::vector<double>& v) {
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

}  // namespace

double road(std::span<const Complex> window) {
    const std::size_t n = half_width_of(window);
    const Complex centre = window[n];
    std::vector<double> d;
    d.reserve(2 * n);
    for (std::size_t j = 0; j < window.size(); ++j) {
        if (j != n) d.push_back(std::abs(centre - window[j]));
    }
    return sum_smallest(d, n);
}

double median_deviation(std::span<const Complex> window) {
    const std::size_t n = half_width_of(window);
    std::vector<double> m(window.size());
    for (std::size_t j = 0; j < window.size(); ++j) m[j] = std::abs(window[j]);
    const double centre = m[n];
    return centre - median_inplace(m);
}

std::size_t reflect_index(std::ptrdiff_t i, std::size_t len) {
    if (len == 1) return 0;
    const auto period = static_cast<std::ptrdiff_t>(2 * (len - 1));
    i %= period;
    if (i < 0) i += period;
    if (i >= static_cast<std::ptrdiff_t>(len)) i = period - i;
    return static_cast<std::size_t>(i);
}

std::vector<FeatureVector> extract_features(std::span<const Complex> samples, std::size_t half_window) {
    if (half_window == 0) throw std::invalid_argument("extract_features: half window must be >= 1");
    const std::size_t len = samples.size();
    const std::size_t n = half_window;
    std::vector<FeatureVector> out(len);
    if (len == 0) return out;

    std::vector<double> mag(len);
    for (std::size_t k = 0; k < len; ++k) mag[k] = std::abs(samples[k]);

    std::vector<double> diffs(2 * n);
    std::vector<double> window_mag(2 * n + 1);
    for (std::size_t k = 0; k < len; ++k) {
        const Complex centre = samples[k];
        std::size_t d = 0;
        for (std::size_t w = 0; w <= 2 * n; ++w) {
            const std::size_t j = reflect_index(static_cast<std::ptrdiff_t>(k + w) - static_cast<std::ptrdiff_t>(n), len);
            window_mag[w] = mag[j];
            if (w != n) diffs[d++] = std::abs(centre - samples[j]);
        }
        out[k].magnitude = mag[k];
        out[k].road = sum_smallest(diffs, n);
        out[k].median_dev = std::abs(mag[k] - median_inplace(window_mag));
    }
    return out;
}

Normalizer fit_normalizer(std::span<const FeatureVector> features) {
    Normalizer norm;
    if (features.empty()) return norm;
    const double count = static_cast<double>(features.size());
    for (int f = 0; f < 3; ++f) {
        double mean = 0.0;
        for (const auto& fv : features) mean += fv.as_array()[f];
        mean /= count;
        double var = 0.0;
        for (const auto& fv : features) {
            const double d = fv.as_array()[f] - mean;
            var += d * d;
        }
        var /= count;
        norm.mean[f] = mean;
        norm.stddev[f] = std::max(std::sqrt(var), kStdFloor);
    }
    return norm;
}

std::array<double, 3> apply_normalizer(const FeatureVector& fv, const Normalizer& norm) {
    const auto x = fv.as_array();
    return {(x[0] - norm.mean[0]) / norm.stddev[0], (x[1] - norm.mean[1]) / norm.stddev[1],
            (x[2] - norm.mean[2]) / norm.stddev[2]};
}

}  // namespace impdet
