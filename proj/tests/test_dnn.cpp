#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "impdet/dnn.hpp"

using namespace impdet;
using doctest::Approx;

namespace {

Batch random_batch(int m, Rng& rng) {
    Batch x(kInputs, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < kInputs; ++i) x(i, j) = 2.0 * complex_normal(rng, 2.0).real();
    return x;
}

std::vector<std::uint8_t> random_labels(int m, Rng& rng) {
    std::vector<std::uint8_t> y(static_cast<std::size_t>(m));
    for (auto& v : y) v = static_cast<std::uint8_t>(rng() & 1);
    return y;
}

MlpTensors random_net(Rng& rng) {
    MlpTensors net = init_network(rng);
    net.for_each([&](auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] += 0.1 * complex_normal(rng, 2.0).real();
    });
    return net;
}

// Which ReLUs are active; finite differences are only valid while this is fixed.
std::vector<bool> relu_pattern(const MlpTensors& net, const Batch& x) {
    const auto c = forward(net, x);
    std::vector<bool> p;
    for (Eigen::Index i = 0; i < c.z1.size(); ++i) p.push_back(c.z1.data()[i] > 0.0);
    for (Eigen::Index i = 0; i < c.z2.size(); ++i) p.push_back(c.z2.data()[i] > 0.0);
    return p;
}

// Scalar Adam, written out independently.
struct RefAdam {
    std::vector<double> m, v;
    long k = 0;
    void step(std::vector<double>& theta, const std::vector<double>& g, double eta) {
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        if (m.empty()) m.assign(theta.size(), 0.0), v.assign(theta.size(), 0.0);
        ++k;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = b1 * m[i] + (1 - b1) * g[i];
            v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
            const double mh = m[i] / (1 - std::pow(b1, static_cast<double>(k)));
            const double vh = v[i] / (1 - std::pow(b2, static_cast<double>(k)));
            theta[i] -= eta * mh / (std::sqrt(vh) + eps);
        }
    }
};

MlpTensors from_flat(const std::vector<double>& v) {
    MlpTensors t;
    t.unflatten(v);
    return t;
}

}  // namespace

TEST_CASE("activations") {
    CHECK(relu(-3.0) == 0.0);
    CHECK(relu(2.0) == 2.0);
    CHECK(sigmoid(0.0) == 0.5);
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = 40.0 * (uniform01(rng) - 0.5);
        CHECK(sigmoid(-x) == Approx(1.0 - sigmoid(x)).epsilon(1e-12));
        CHECK(sigmoid(x) > 0.0);
        CHECK(sigmoid(x) < 1.0);
    }
    CHECK(sigmoid(800.0) == 1.0);
    CHECK(sigmoid(-800.0) >= 0.0);
}

TEST_CASE("forward pass") {
    const MlpTensors zero;
    Rng rng(2);
    const auto x = random_batch(50, rng);
    const auto c = forward(zero, x);
    for (Eigen::Index i = 0; i < 50; ++i) CHECK(c.yhat(0, i) == 0.5);

    // One active neuron per layer.
    MlpTensors chain;
    chain.W1(0, 0) = 2.0;
    chain.W1(0, 2) = -1.0;
    chain.b1(0) = 0.5;
    chain.W2(0, 0) = -1.5;
    chain.b2(0) = 4.0;
    chain.W3(0, 0) = 0.75;
    chain.b3(0, 0) = -1.0;
    const std::array<double, 3> in{1.0, 9.0, 0.5};
    const double a1 = std::max(0.0, 2.0 * 1.0 - 1.0 * 0.5 + 0.5);
    const double a2 = std::max(0.0, -1.5 * a1 + 4.0);
    const double expected = 1.0 / (1.0 + std::exp(-(0.75 * a2 - 1.0)));
    CHECK(forward(chain, in) == Approx(expected).epsilon(1e-15));

    const auto net = random_net(rng);
    const auto y = forward(net, random_batch(500, rng)).yhat;
    CHECK(y.minCoeff() > 0.0);
    CHECK(y.maxCoeff() < 1.0);
}

TEST_CASE("loss values") {
    Rng rng(3);
    const auto x = random_batch(40, rng);
    const auto y = random_labels(40, rng);
    CHECK(loss(MlpTensors{}, x, y, 0.0) == Approx(std::log(2.0)).epsilon(1e-14));

    // Saturated output on the right side of every label.
    MlpTensors sure;
    sure.b3(0, 0) = 60.0;
    CHECK(loss(sure, x, std::vector<std::uint8_t>(40, 1), 0.0) < 1e-10);

    const auto net = random_net(rng);
    double wsq = 0.0;
    for (auto v : {net.W1.squaredNorm(), net.W2.squaredNorm(), net.W3.squaredNorm()}) wsq += v;
    CHECK(loss(net, x, y, 0.3) - loss(net, x, y, 0.0) == Approx(0.3 / (2.0 * 40.0) * wsq).epsilon(1e-12));
    CHECK(net.weight_square_sum() == Approx(wsq).epsilon(1e-14));
    CHECK_THROWS_AS(loss(net, Batch(kInputs, 0), {}, 0.1), std::invalid_argument);
}

TEST_CASE("backprop agrees with central finite differences") {
    Rng rng(4);
    int checked = 0, skipped = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = random_net(rng);
        const auto x = random_batch(16, rng);
        const auto y = random_labels(16, rng);
        const double lambda = 0.1;
        const auto g = backward(net, x, y, lambda).flatten();
        const auto base = relu_pattern(net, x);
        auto theta = net.flatten();
        const double h = 1e-4;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double t0 = theta[i];
            double f[4];
            bool smooth = true;
            const double offsets[4] = {-2.0, -1.0, 1.0, 2.0};
            for (int k = 0; k < 4; ++k) {
                theta[i] = t0 + offsets[k] * h;
                const auto perturbed = from_flat(theta);
                smooth = smooth && relu_pattern(perturbed, x) == base;
                f[k] = loss(perturbed, x, y, lambda);
            }
            theta[i] = t0;
            if (!smooth) {
                ++skipped;
                continue;
            }
            // five-point central stencil
            const double fd = (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h);
            const double scale = std::max(std::abs(fd), std::abs(g[i]));
            if (scale > 1e-6)
                CHECK(std::abs(fd - g[i]) / scale < 1e-5);
            else
                CHECK(std::abs(fd - g[i]) < 1e-10);
            ++checked;
        }
    }
    CHECK(checked > 20 * skipped);
}

TEST_CASE("gradient properties") {
    Rng rng(5);
    const auto net = random_net(rng);
    const auto x = random_batch(30, rng);
    const auto y = random_labels(30, rng);
    Batch xx(kInputs, 60);
    xx << x, x;
    std::vector<std::uint8_t> yy(y);
    yy.insert(yy.end(), y.begin(), y.end());
    const auto g1 = backward(net, x, y, 0.0).flatten();
    const auto g2 = backward(net, xx, yy, 0.0).flatten();
    for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g2[i] == Approx(g1[i]).epsilon(1e-12));

    const Batch zeros = Batch::Zero(kInputs, 8);
    CHECK(backward(net, zeros, std::vector<std::uint8_t>(8, 1), 0.1).b3(0, 0) < 0.0);
}

TEST_CASE("Adam first step closed form") {
    MlpTensors theta;
    MlpTensors g;
    Rng rng(6);
    g.for_each([&](auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = complex_normal(rng, 2.0).real();
    });
    AdamState st;
    st.eta = 0.01;
    adam_step(st, theta, g);
    CHECK(st.step == 1);
    const auto th = theta.flatten();
    const auto gf = g.flatten();
    for (std::size_t i = 0; i < th.size(); ++i)
        CHECK(th[i] == Approx(-0.01 * gf[i] / (std::abs(gf[i]) + 1e-8)).epsilon(1e-12));
}

TEST_CASE("Adam with zero gradient leaves parameters unchanged") {
    Rng rng(7);
    MlpTensors theta = random_net(rng);
    const auto before = theta.flatten();
    AdamState st;
    for (int i = 0; i < 50; ++i) adam_step(st, theta, MlpTensors{});
    CHECK(theta.flatten() == before);
}

TEST_CASE("Adam matches the reference over 100 random steps") {
    Rng rng(8);
    MlpTensors theta = random_net(rng);
    std::vector<double> ref = theta.flatten();
    AdamState st;
    st.eta = 0.01;
    RefAdam ra;
    for (int k = 0; k < 100; ++k) {
        std::vector<double> g(MlpTensors::kParameterCount);
        for (auto& v : g) v = complex_normal(rng, 2.0).real() * (k % 7 == 0 ? 1e-3 : 1.0);
        adam_step(st, theta, from_flat(g));
        ra.step(ref, g, 0.01);
    }
    const auto got = theta.flatten();
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - ref[i]) <= 1e-12);
}

TEST_CASE("Adam on a scalar quadratic") {
    MlpTensors theta;
    theta.b3(0, 0) = 1.0;
    std::vector<double> ref{1.0};
    AdamState st;
    st.eta = 0.01;
    RefAdam ra;
    int first = -1;
    for (int k = 1; k <= 500; ++k) {
        MlpTensors g;
        g.b3(0, 0) = theta.b3(0, 0);
        adam_step(st, theta, g);
        ra.step(ref, {ref[0]}, 0.01);
        CHECK(theta.b3(0, 0) == Approx(ref[0]).epsilon(1e-12).scale(1e-12));
        if (first < 0 && std::abs(theta.b3(0, 0)) < 1e-3) first = k;
    }
    CHECK(first > 0);
    CHECK(std::abs(theta.b3(0, 0)) < 1e-3);
}

TEST_CASE("Xavier initialization") {
    Rng a(9), b(9);
    const auto m1 = xavier_init(20, 3, a);
    CHECK(m1 == xavier_init(20, 3, b));
    const double bound = std::sqrt(6.0 / 23.0);
    CHECK(m1.cwiseAbs().maxCoeff() <= bound);

    Rng rng(10);
    const auto big = xavier_init(300, 400, rng);
    const double mean = big.mean();
    const double var = (big.array() - mean).square().mean();
    CHECK(var == Approx(2.0 / 700.0).epsilon(0.05));
    CHECK(big.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 700.0));

    Rng r2(11);
    const auto net = init_network(r2);
    CHECK(net.b1.isZero());
    CHECK(net.b2.isZero());
    CHECK(net.b3.isZero());
}

TEST_CASE("training separates two clusters") {
    Rng rng(12);
    std::vector<FeatureVector> f;
    Mask y;
    for (int i = 0; i < 2000; ++i) {
        const bool pos = i % 2;
        const double c = pos ? 5.0 : 0.0;
        f.push_back({c + 0.5 * complex_normal(rng, 2.0).real(), c + 0.5 * complex_normal(rng, 2.0).real(),
                     c + 0.5 * complex_normal(rng, 2.0).real()});
        y.push_back(pos ? 1 : 0);
    }
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batch_size = 64;
    const auto r = train(f, y, cfg);
    REQUIRE(r.loss_trace.size() == 51);
    CHECK(r.loss_trace.back() < r.loss_trace.front());
    const auto pred = classify(r.params, f);
    int correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) correct += pred[i] == y[i];
    CHECK(correct >= 1980);

    const auto again = train(f, y, cfg);
    CHECK(again.params.net.flatten() == r.params.net.flatten());
    CHECK(again.loss_trace == r.loss_trace);
}

TEST_CASE("training on clean-only data predicts clean") {
    Rng rng(13);
    std::vector<FeatureVector> f, held;
    for (int i = 0; i < 3000; ++i) {
        const FeatureVector v{std::abs(complex_normal(rng, 1.0)), std::abs(complex_normal(rng, 1.0)),
                              std::abs(complex_normal(rng, 1.0))};
        (i < 2000 ? f : held).push_back(v);
    }
    TrainConfig cfg;
    cfg.epochs = 10;
    const auto r = train(f, Mask(f.size(), 0), cfg);
    const auto pred = classify(r.params, held);
    CHECK(std::count(pred.begin(), pred.end(), 0) >= 990);
}

TEST_CASE("training input checks") {
    TrainConfig cfg;
    CHECK_THROWS(train({}, {}, cfg));
    const std::vector<FeatureVector> f(3);
    CHECK_THROWS(train(f, Mask(2, 0), cfg));
    cfg.eta = 0.0;
    CHECK_THROWS(train(f, Mask(3, 0), cfg));
    cfg.eta = 0.01;
    cfg.batch_size = 0;
    CHECK_THROWS(train(f, Mask(3, 0), cfg));
    cfg.batch_size = 1;
    cfg.eta = 1e300;
    std::vector<FeatureVector> g{{1, 2, 3}, {4, 5, 6}, {0, 1, 0}};
    CHECK_THROWS_AS(train(g, Mask{0, 1, 0}, cfg), std::runtime_error);
}

TEST_CASE("classification boundary") {
    MlpParams p;
    const std::vector<FeatureVector> f(4, FeatureVector{1.0, 2.0, 3.0});
    const auto m = classify(p, f);
    for (auto v : m) CHECK(v == 1);  // yhat = 0.5 exactly
    CHECK(classify(p, f, 0.5000001)[0] == 0);
}

TEST_CASE("model file round trip") {
    Rng rng(14);
    MlpParams p;
    p.net = random_net(rng);
    p.normalizer.mean = {0.1, 1.0 / 3.0, 2e-7};
    p.normalizer.stddev = {1.5, 0.25, 1e-12};
    p.seed = 1234567;
    std::stringstream ss;
    save_model(ss, p, {"note=x"});
    const std::string text = ss.str();
    CHECK(text.find("impdet-mlp 1") != std::string::npos);
    const MlpParams q = load_model(ss);
    CHECK(q.net.flatten() == p.net.flatten());
    CHECK(q.normalizer.mean == p.normalizer.mean);
    CHECK(q.normalizer.stddev == p.normalizer.stddev);
    CHECK(q.seed == p.seed);
    std::stringstream again;
    save_model(again, q, {"note=x"});
    CHECK(again.str() == text);

    std::stringstream bad("impdet-mlp 2\n");
    CHECK_THROWS(load_model(bad));
    std::stringstream junk("hello\n");
    CHECK_THROWS(load_model(junk));
    std::string truncated = text.substr(0, text.size() / 2);
    std::stringstream tr(truncated);
    CHECK_THROWS(load_model(tr));
}
