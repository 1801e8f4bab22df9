#include <doctest.h>

#include <cmath>
#include <memory>

#include "impdet/mitigation.hpp"
#include "impdet/noise_models.hpp"

using namespace impdet;
using doctest::Approx;

namespace {

ComplexVec noise(std::size_t n, double var, Rng& rng) {
    ComplexVec v(n);
    for (auto& x : v) x = complex_normal(rng, var);
    return v;
}

Mask random_mask(std::size_t n, Rng& rng) {
    Mask m(n);
    for (auto& v : m) v = static_cast<std::uint8_t>(uniform01(rng) < 0.3);
    return m;
}

}  // namespace

TEST_CASE("blanking") {
    Rng rng(1);
    const auto x = noise(100, 1.0, rng);
    CHECK(blank(x, Mask(100, 0)) == x);
    for (const auto& v : blank(x, Mask(100, 1))) CHECK(v == Complex{});
    const auto m = random_mask(100, rng);
    const auto y = blank(x, m);
    for (std::size_t k = 0; k < 100; ++k) CHECK(y[k] == (m[k] ? Complex{} : x[k]));
    CHECK_THROWS_AS(blank(x, Mask(99, 0)), std::invalid_argument);
}

TEST_CASE("clipping") {
    const ComplexVec x{std::polar(10.0, 0.7), std::polar(1.0, -2.0), std::polar(10.0, 1.1), Complex{}};
    const Mask m{1, 1, 0, 1};
    const auto y = clip(x, m, 2.0);
    CHECK(std::abs(y[0]) == Approx(2.0));
    CHECK(std::arg(y[0]) == Approx(0.7));
    CHECK(y[1] == x[1]);
    CHECK(y[2] == x[2]);
    CHECK(y[3] == Complex{});
    CHECK_THROWS_AS(clip(x, m, 0.0), std::invalid_argument);
}

TEST_CASE("Neyman-Pearson threshold") {
    CHECK(np_threshold(1.0, std::exp(-1.0)) == Approx(1.0).epsilon(1e-15));
    CHECK(np_threshold(2.0, 0.005) > np_threshold(2.0, 0.01));
    CHECK_THROWS(np_threshold(0.0, 0.1));
    CHECK_THROWS(np_threshold(1.0, 0.0));
    CHECK_THROWS(np_threshold(1.0, 1.0));
}

TEST_CASE("false-alarm calibration") {
    Rng rng(2);
    const std::size_t n = 1'000'000;
    const double s2 = 0.9;
    const auto x = noise(n, s2, rng);
    for (double pfa : {0.1, 0.01, 0.001}) {
        const auto m = threshold_detect(x, np_threshold(s2, pfa));
        const double rate = static_cast<double>(std::count(m.begin(), m.end(), 1)) / static_cast<double>(n);
        CHECK(rate == Approx(pfa).epsilon(0.10));
    }
    // Same with the power estimated from the block itself.
    CHECK(robust_power(x) == Approx(s2).epsilon(0.01));
    const auto m = threshold_detect(x, np_threshold(robust_power(x), 0.01));
    CHECK(static_cast<double>(std::count(m.begin(), m.end(), 1)) / static_cast<double>(n) == Approx(0.01).epsilon(0.1));
}

TEST_CASE("robust power ignores a minority of impulses") {
    Rng rng(3);
    const auto b = sample_bg(BgParams{0.05, 1.0, 1000.0}, 200000, rng);
    CHECK(robust_power(b.samples) == Approx(1.0).epsilon(0.1));
}

TEST_CASE("threshold detection") {
    Rng rng(4);
    const auto x = noise(1000, 1.0, rng);
    for (auto v : threshold_detect(x, INFINITY)) CHECK(v == 0);
    for (auto v : threshold_detect(x, 1e-300)) CHECK(v == 1);
    const auto m = threshold_detect(x, 1.1);
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(m[k] == (std::abs(x[k]) > 1.1 ? 1 : 0));
}

TEST_CASE("detector and suppressor compose") {
    Rng rng(5);
    auto b = sample_bg(BgParams{0.05, 1.0, 100.0}, 4096, rng);
    const ThresholdDetector det{std::nullopt, 0.01};
    const MitigationPolicy pb{"blank", det, Blank{}};
    const auto out = mitigate(b.samples, pb);
    const auto mask = detect(b.samples, det);
    CHECK(out.mask == mask);
    CHECK(out.samples == blank(b.samples, mask));

    const double T = np_threshold(robust_power(b.samples), 0.01);
    CHECK(mask == threshold_detect(b.samples, T));

    const auto clipped = mitigate(b.samples, make_policy("clip", nullptr, 0.01));
    CHECK(clipped.samples == clip(b.samples, mask, T));

    const MitigationPolicy tiny{"c", ThresholdDetector{1.0, 0.01}, Clip{1e-300, 0.01}};
    const MitigationPolicy blk{"b", ThresholdDetector{1.0, 0.01}, Blank{}};
    const auto c0 = mitigate(b.samples, tiny).samples;
    const auto b0 = mitigate(b.samples, blk).samples;
    for (std::size_t k = 0; k < c0.size(); ++k) CHECK(std::abs(c0[k] - b0[k]) < 1e-250);

    const auto none = mitigate(b.samples, make_policy("none"));
    CHECK(none.samples == b.samples);
}

TEST_CASE("mitigation never increases magnitudes") {
    Rng rng(6);
    auto net = std::make_shared<MlpParams>();
    net->net = init_network(rng);
    const auto x = sample_bg(BgParams{0.1, 1.0, 50.0}, 2048, rng).samples;
    for (const auto& pol : {make_policy("blank"), make_policy("clip"), make_policy("dnn", net), make_policy("dnn-clip", net),
                            MitigationPolicy{"fixed", ThresholdDetector{0.5, 0.01}, Clip{0.2, 0.01}}}) {
        const auto y = mitigate(x, pol).samples;
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(y[k]) <= std::abs(x[k]));
    }
}

TEST_CASE("policy construction and validation") {
    CHECK_THROWS(make_policy("dnn"));
    CHECK_THROWS(make_policy("median"));
    MitigationPolicy bad{"x", ThresholdDetector{-1.0, 0.01}, Blank{}};
    CHECK_THROWS(bad.validate());
    bad = {"x", ThresholdDetector{std::nullopt, 0.01}, Clip{0.0, 0.01}};
    CHECK_THROWS(bad.validate());
    bad = {"x", DnnDetector{}, Blank{}};
    CHECK_THROWS(bad.validate());
    CHECK_NOTHROW(make_policy("clip").validate());
}
