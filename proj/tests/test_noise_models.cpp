#include <doctest.h>

#include <algorithm>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "impdet/noise_models.hpp"

using namespace impdet;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double mean_power(const ComplexVec& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return s / static_cast<double>(v.size());
}

double label_mean(const Mask& m) {
    return static_cast<double>(std::accumulate(m.begin(), m.end(), 0.0)) / static_cast<double>(m.size());
}

// Class A density at x, term by term in 50-digit arithmetic, weights
// renormalized over the truncated support.
double mca_pdf_reference(double A, double Gamma, double sigma_n2, int J, double x_abs2) {
    using big = boost::multiprecision::cpp_dec_float_50;
    const big a(A), g(Gamma), s2(sigma_n2), r2(x_abs2);
    std::vector<big> p(J), var(J);
    big mass = 0;
    big fact = 1;
    for (int j = 0; j < J; ++j) {
        if (j > 0) fact *= j;
        p[j] = exp(-a) * pow(a, j) / fact;
        var[j] = (big(j) / a + g) / (1 + g) * s2;
        mass += p[j];
    }
    big pdf = 0;
    const big pi = boost::math::constants::pi<big>();
    for (int j = 0; j < J; ++j) pdf += p[j] / mass / (pi * var[j]) * exp(-r2 / var[j]);
    return pdf.convert_to<double>();
}

// CDF of the symmetric stable law with characteristic function
// exp(-|gamma t|^alpha), by Gil-Pelaez inversion and composite Simpson.
double sas_cdf(double x, double alpha, double gamma) {
    const double T = 60.0 / gamma;
    const int steps = 200000;
    const double h = T / steps;
    auto f = [&](double t) {
        if (t == 0.0) return x;
        return std::sin(x * t) / t * std::exp(-std::pow(gamma * t, alpha));
    };
    double s = f(0.0) + f(T);
    for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return 0.5 + s * h / 3.0 / kPi;
}

double sas_quantile(double q, double alpha, double gamma) {
    double lo = -50.0, hi = 50.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sas_cdf(mid, alpha, gamma) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double empirical_quantile(std::vector<double> v, double q) {
    const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

}  // namespace

TEST_CASE("BG density closed forms") {
    CHECK(mixture_pdf(BgParams{0.0, 1.0, 7.0}, {0.0, 0.0}) == Approx(1.0 / kPi).epsilon(1e-15));
    CHECK(mixture_pdf(BgParams{0.5, 1.0, 1.0}, {0.0, 0.0}) ==
          Approx(0.5 / kPi + 0.5 / (2.0 * kPi)).epsilon(1e-15));
}

TEST_CASE("alpha-stable has no mixture density") {
    CHECK_THROWS_AS(mixture_pdf(SasParams{}, {0.0, 0.0}), UnsupportedVariant);
    CHECK_THROWS_AS(mixture_components(SasParams{}), UnsupportedVariant);
}

TEST_CASE("Class A density matches high-precision term-by-term sum") {
    for (double r2 : {0.0, 0.01, 0.3, 1.0, 4.0, 25.0}) {
        const double ref = mca_pdf_reference(1.0, 0.2, 1.0, 10, r2);
        const double got = mixture_pdf(McaParams{1.0, 0.2, 1.0, 10}, {std::sqrt(r2), 0.0});
        CHECK(got == Approx(ref).epsilon(1e-12));
    }
    CHECK(mixture_pdf(McaParams{0.3, 0.05, 2.5, 8}, {0.4, -0.2}) ==
          Approx(mca_pdf_reference(0.3, 0.05, 2.5, 8, 0.2)).epsilon(1e-12));
}

TEST_CASE("Class A components") {
    auto [p0, v0] = mca_component(1.0, 0.2, 1.2, 0);
    CHECK(p0 == Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(v0 == Approx(0.2).epsilon(1e-15));

    auto [p1, v1] = mca_component(0.5, 1.0, 2.0, 1);
    CHECK(p1 == Approx(0.5 * std::exp(-0.5)).epsilon(1e-15));
    // (1/0.5 + 1) / (1 + 1) * 2 = 3
    CHECK(v1 == Approx(3.0).epsilon(1e-15));

    auto [p10, v10] = mca_component(1.0, 0.2, 1.0, 10);
    CHECK(p10 == Approx(std::exp(-1.0) / 3628800.0).epsilon(1e-13));
    CHECK(v10 == Approx((10.0 + 0.2) / 1.2).epsilon(1e-15));
}

TEST_CASE("Class A truncation") {
    const Mixture m = mixture_components(McaParams{1.0, 0.2, 1.0, 10});
    REQUIRE(m.weights.size() == 10);
    CHECK(std::accumulate(m.weights.begin(), m.weights.end(), 0.0) == Approx(1.0).epsilon(1e-15));
    // Renormalization keeps the Poisson ratios p_{j+1}/p_j = A/(j+1).
    for (std::size_t j = 0; j + 1 < m.weights.size(); ++j)
        CHECK(m.weights[j + 1] / m.weights[j] == Approx(1.0 / static_cast<double>(j + 1)).epsilon(1e-12));
    // Poisson(5) keeps only ~0.968 of its mass in j < 10.
    CHECK_THROWS_AS(mixture_components(McaParams{5.0, 0.2, 1.0, 10}), TruncationError);
    Rng rng(1);
    CHECK_THROWS_AS(sample_mca(McaParams{5.0, 0.2, 1.0, 10}, 10, rng), TruncationError);
}

TEST_CASE("mixture densities integrate to one") {
    const std::vector<NoiseSpec> specs = {BgParams{0.05, 1.0, 20.0}, BgParams{0.5, 0.3, 1.0},
                                          McaParams{1.0, 0.2, 1.0, 10}, McaParams{0.1, 0.01, 2.0, 6}};
    for (const auto& spec : specs) {
        const Mixture m = mixture_components(spec);
        const double sigma = std::sqrt(*std::max_element(m.variances.begin(), m.variances.end()));
        const double R = 10.0 * sigma;
        const int steps = 40000;
        const double h = R / steps;
        // Circular symmetry: integral = 2 pi * int_0^R r pdf(r) dr.
        auto f = [&](double r) { return r * mixture_pdf(spec, {r, 0.0}); };
        double s = f(0.0) + f(R);
        for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
        CHECK(2.0 * kPi * s * h / 3.0 == Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("BG degenerate mixtures") {
    Rng rng(11);
    const auto b0 = sample_bg(BgParams{0.0, 2.0, 50.0}, 1'000'000, rng);
    CHECK(label_mean(b0.require_labels()) == 0.0);
    CHECK(mean_power(b0.samples) == Approx(2.0).epsilon(0.01));

    const auto b1 = sample_bg(BgParams{1.0, 2.0, 50.0}, 1'000'000, rng);
    CHECK(label_mean(b1.require_labels()) == 1.0);
    CHECK(mean_power(b1.samples) == Approx(52.0).epsilon(0.01));
}

TEST_CASE("BG label rate and second moment") {
    Rng rng(12);
    const BgParams p{0.05, 1.0, 20.0};
    const auto b = sample_bg(p, 1'000'000, rng);
    const double tol = 3.0 * std::sqrt(0.05 * 0.95 / 1e6);
    CHECK(std::abs(label_mean(b.require_labels()) - 0.05) <= tol);
    CHECK(mean_power(b.samples) == Approx(0.95 * 1.0 + 0.05 * 21.0).epsilon(0.02));
    for (std::size_t k = 0; k < 1000; ++k)
        if (!b.require_labels()[k]) CHECK(b.impulsive[k] == Complex{});
}

TEST_CASE("Class A empirical variance") {
    Rng rng(13);
    const McaParams p{1.0, 0.2, 1.0, 10};
    const Mixture m = mixture_components(p);
    double expected = 0.0;
    for (std::size_t j = 0; j < m.weights.size(); ++j) expected += m.weights[j] * m.variances[j];
    const auto b = sample_mca(p, 1'000'000, rng);
    CHECK(mean_power(b.samples) == Approx(expected).epsilon(0.02));
    CHECK(expected == Approx(1.0).epsilon(1e-3));
    CHECK(label_mean(b.require_labels()) == Approx(1.0 - m.weights[0]).epsilon(0.01));
}

TEST_CASE("alpha-stable reduces to Gaussian at alpha = 2") {
    Rng rng(14);
    const auto b = sample_sas(SasParams{2.0, 0.0, 1.0, 0.0}, 1'000'000, rng);
    CHECK_FALSE(b.labels.has_value());
    CHECK_THROWS(b.require_labels());
    double m2 = 0.0, m4 = 0.0, mean = 0.0;
    for (const auto& x : b.samples) mean += x.real();
    mean /= 1e6;
    for (const auto& x : b.samples) {
        const double d = x.real() - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= 1e6;
    m4 /= 1e6;
    CHECK(m2 == Approx(2.0).epsilon(0.02));
    CHECK(std::abs(m4 / (m2 * m2) - 3.0) < 5.0 * std::sqrt(24.0 / 1e6));
}

TEST_CASE("alpha-stable location and quantile") {
    Rng rng(15);
    for (double alpha : {0.8, 1.0, 1.5}) {
        const auto b = sample_sas(SasParams{alpha, 0.0, 1.0, 5.0}, 200'001, rng);
        std::vector<double> re;
        for (const auto& x : b.samples) re.push_back(x.real());
        CHECK(empirical_quantile(re, 0.5) == Approx(5.0).epsilon(0.01));
    }
    const auto b = sample_sas(SasParams{1.5, 0.0, 1.0, 0.0}, 1'000'000, rng);
    std::vector<double> re, im;
    for (const auto& x : b.samples) {
        re.push_back(x.real());
        im.push_back(x.imag());
    }
    const double q = sas_quantile(0.75, 1.5, 1.0);
    CHECK(empirical_quantile(re, 0.75) == Approx(q).epsilon(0.02));
    CHECK(empirical_quantile(im, 0.75) == Approx(q).epsilon(0.02));
}

TEST_CASE("alpha-stable parameter checks") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_sas(SasParams{0.0, 0.0, 1.0, 0.0}, 4, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_sas(SasParams{2.1, 0.0, 1.0, 0.0}, 4, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_sas(SasParams{1.5, 1.5, 1.0, 0.0}, 4, rng), std::invalid_argument);
    CHECK_THROWS_AS(validate(BgParams{1.5, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(McaParams{1.0, 0.0, 1.0, 10}), std::invalid_argument);
}

TEST_CASE("bursty noise with Num = 1 is BG") {
    const BgParams p{0.06, 1.0, 10.0};
    Rng a(21), b(21);
    const auto x = sample_bursty(p, 1, 5000, a);
    const auto y = sample_bg(p, 5000, b);
    CHECK(x.samples == y.samples);
    CHECK(*x.labels == *y.labels);
}

TEST_CASE("bursty noise runs and marginal rate") {
    const BgParams p{0.06, 1.0, 10.0};
    for (std::size_t num : {2u, 4u}) {
        Rng rng(22 + num);
        const std::size_t n = 1'000'000;
        const auto b = sample_bursty(p, num, n, rng);
        const Mask& l = b.require_labels();
        CHECK(label_mean(l) == Approx(0.06).epsilon(0.05));
        std::size_t k = 0, bad = 0;
        while (k < n) {
            if (!l[k]) {
                ++k;
                continue;
            }
            std::size_t run = 0;
            while (k < n && l[k]) ++run, ++k;
            if (run != num && k != n) ++bad;
        }
        CHECK(bad == 0);
    }
    CHECK(burst_start_probability(0.06, 4) == Approx(0.06 / (4.0 * 0.94)).epsilon(1e-15));
}

TEST_CASE("same seed, same noise") {
    const std::vector<NoiseSpec> specs = {BgParams{0.1, 1.0, 5.0}, McaParams{1.0, 0.2, 1.0, 10},
                                          SasParams{1.5, 0.0, 1.0, 0.0}};
    for (const auto& spec : specs) {
        const auto a = sample_noise(spec, 4096, 99);
        const auto b = sample_noise(spec, 4096, 99);
        const auto c = sample_noise(spec, 4096, 100);
        CHECK(a.samples == b.samples);
        CHECK(a.seed == 99);
        CHECK(a.samples != c.samples);
    }
}
