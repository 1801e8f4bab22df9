#include "impdet/dnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace impdet {

std::vector<double> MlpTensors::flatten() const {
    std::vector<double> out;
    out.reserve(kParameterCount);
    for_each([&](const auto& t) { out.insert(out.end(), t.data(), t.data() + t.size()); });
    return out;
}

void MlpTensors::unflatten(std::span<const double> values) {
    if (values.size() != kParameterCount) throw std::invalid_argument("unflatten: wrong parameter count");
    std::size_t pos = 0;
    for_each([&](auto& t) {
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), t.size(), t.data());
        pos += static_cast<std::size_t>(t.size());
    });
}

double MlpTensors::weight_square_sum() const {
    return W1.squaredNorm() + W2.squaredNorm() + W3.squaredNorm();
}

bool MlpTensors::all_finite() const {
    bool ok = true;
    for_each([&](const auto& t) { ok = ok && t.allFinite(); });
    return ok;
}

double relu(double x) { return std::max(x, 0.0); }

double sigmoid(double x) {
    // Split by sign so exp never overflows.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

ForwardCache forward(const MlpTensors& net, const Batch& x) {
    ForwardCache c;
    c.z1 = (net.W1 * x).colwise() + net.b1;
    c.a1 = c.z1.cwiseMax(0.0);
    c.z2 = (net.W2 * c.a1).colwise() + net.b2;
    c.a2 = c.z2.cwiseMax(0.0);
    const Eigen::Matrix<double, 1, Eigen::Dynamic> z3 = (net.W3 * c.a2).array() + net.b3(0, 0);
    c.yhat = z3.unaryExpr([](double v) { return sigmoid(v); });
    return c;
}

double forward(const MlpTensors& net, const std::array<double, 3>& x) {
    Batch b(kInputs, 1);
    b << x[0], x[1], x[2];
    return forward(net, b).yhat(0, 0);
}

Batch make_batch(const Normalizer& norm, std::span<const FeatureVector> features) {
    Batch b(kInputs, static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto z = apply_normalizer(features[i], norm);
        b.col(static_cast<Eigen::Index>(i)) << z[0], z[1], z[2];
    }
    return b;
}

double predict(const MlpParams& params, const FeatureVector& fv) {
    return forward(params.net, apply_normalizer(fv, params.normalizer));
}

std::vector<double> predict(const MlpParams& params, std::span<const FeatureVector> features) {
    const auto c = forward(params.net, make_batch(params.normalizer, features));
    return {c.yhat.data(), c.yhat.data() + c.yhat.size()};
}

double loss(const MlpTensors& net, const Batch& x, std::span<const std::uint8_t> y, double lambda) {
    const auto m = static_cast<std::size_t>(x.cols());
    if (m == 0) throw std::invalid_argument("loss: empty batch");
    if (y.size() != m) throw std::invalid_argument("loss: label count does not match batch");
    const auto c = forward(net, x);
    double ce = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double p = std::clamp(c.yhat(0, static_cast<Eigen::Index>(i)), kProbClamp, 1.0 - kProbClamp);
        ce -= y[i] ? std::log(p) : std::log(1.0 - p);
    }
    const double md = static_cast<double>(m);
    return ce / md + lambda / (2.0 * md) * net.weight_square_sum();
}

MlpTensors backward(const MlpTensors& net, const Batch& x, std::span<const std::uint8_t> y, double lambda) {
    const auto m = x.cols();
    if (m == 0) throw std::invalid_argument("backward: empty batch");
    if (y.size() != static_cast<std::size_t>(m)) throw std::invalid_argument("backward: label count does not match batch");
    const auto c = forward(net, x);
    const double md = static_cast<double>(m);

    // dL/dz3 = (yhat - y) / m for sigmoid + cross-entropy.
    Eigen::Matrix<double, 1, Eigen::Dynamic> dz3(1, m);
    for (Eigen::Index i = 0; i < m; ++i) dz3(0, i) = (c.yhat(0, i) - static_cast<double>(y[i])) / md;

    MlpTensors g;
    g.W3 = dz3 * c.a2.transpose() + (lambda / md) * net.W3;
    g.b3(0, 0) = dz3.sum();

    const Eigen::Matrix<double, kHidden2, Eigen::Dynamic> dz2 =
        ((net.W3.transpose() * dz3).array() * (c.z2.array() > 0.0).cast<double>()).matrix();
    g.W2 = dz2 * c.a1.transpose() + (lambda / md) * net.W2;
    g.b2 = dz2.rowwise().sum();

    const Eigen::Matrix<double, kHidden1, Eigen::Dynamic> dz1 =
        ((net.W2.transpose() * dz2).array() * (c.z1.array() > 0.0).cast<double>()).matrix();
    g.W1 = dz1 * x.transpose() + (lambda / md) * net.W1;
    g.b1 = dz1.rowwise().sum();
    return g;
}

void adam_step(AdamState& state, MlpTensors& params, const MlpTensors& grads) {
    ++state.step;
    const double k = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, k);
    const double c2 = 1.0 - std::pow(state.beta2, k);
    auto update = [&](auto& theta, auto& m, auto& v, const auto& g) {
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseAbs2();
        theta.array() -= state.eta * (m.array() / c1) / ((v.array() / c2).sqrt() + state.epsilon);
    };
    update(params.W1, state.m.W1, state.v.W1, grads.W1);
    update(params.b1, state.m.b1, state.v.b1, grads.b1);
    update(params.W2, state.m.W2, state.v.W2, grads.W2);
    update(params.b2, state.m.b2, state.v.b2, grads.b2);
    update(params.W3, state.m.W3, state.v.W3, grads.W3);
    update(params.b3, state.m.b3, state.v.b3, grads.b3);
}

Eigen::MatrixXd xavier_init(int rows, int cols, Rng& rng) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("xavier_init: shape must be positive");
    const double bound = std::sqrt(6.0 / (rows + cols));
    Eigen::MatrixXd w(rows, cols);
    // Row-major fill order.
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) w(r, c) = bound * (2.0 * uniform01(rng) - 1.0);
    return w;
}

MlpTensors init_network(Rng& rng) {
    MlpTensors net;
    net.W1 = xavier_init(kHidden1, kInputs, rng);
    net.W2 = xavier_init(kHidden2, kHidden1, rng);
    net.W3 = xavier_init(1, kHidden2, rng);
    return net;
}

void TrainConfig::validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("train: eta must be > 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("train: lambda must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
}

TrainResult train(std::span<const FeatureVector> features, std::span<const std::uint8_t> labels, const TrainConfig& cfg) {
    cfg.validate();
    if (features.empty()) throw std::invalid_argument("train: empty dataset");
    if (features.size() != labels.size()) throw std::invalid_argument("train: feature/label count mismatch");

    TrainResult result;
    MlpParams& params = result.params;
    params.seed = cfg.seed;
    params.normalizer = fit_normalizer(features);

    Rng rng(cfg.seed);
    params.net = init_network(rng);

    const Batch all = make_batch(params.normalizer, features);
    auto full_loss = [&] {
        constexpr Eigen::Index kChunk = 8192;
        const Eigen::Index total = all.cols();
        double bce = 0.0;
        for (Eigen::Index s = 0; s < total; s += kChunk) {
            const Eigen::Index len = std::min(kChunk, total - s);
            const Batch chunk = all.middleCols(s, len);
            bce += loss(params.net, chunk, labels.subspan(static_cast<std::size_t>(s), static_cast<std::size_t>(len)), 0.0) *
                   static_cast<double>(len);
        }
        const double l = bce / static_cast<double>(total) +
                         cfg.lambda / (2.0 * static_cast<double>(total)) * params.net.weight_square_sum();
        if (!std::isfinite(l)) throw std::runtime_error("train: loss diverged (non-finite)");
        return l;
    };
    result.loss_trace.push_back(full_loss());

    AdamState adam;
    adam.eta = cfg.eta;
    const std::size_t n = features.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto bs = static_cast<std::size_t>(cfg.batch_size);
    Batch xb;
    std::vector<std::uint8_t> yb;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n; start += bs) {
            const std::size_t len = std::min(bs, n - start);
            xb.resize(kInputs, static_cast<Eigen::Index>(len));
            yb.resize(len);
            for (std::size_t i = 0; i < len; ++i) {
                xb.col(static_cast<Eigen::Index>(i)) = all.col(static_cast<Eigen::Index>(order[start + i]));
                yb[i] = labels[order[start + i]];
            }
            adam_step(adam, params.net, backward(params.net, xb, yb, cfg.lambda));
        }
        if (!params.net.all_finite()) throw std::runtime_error("train: parameters diverged (non-finite)");
        result.loss_trace.push_back(full_loss());
    }
    return result;
}

Mask classify(const MlpParams& params, std::span<const FeatureVector> features, double threshold) {
    const auto p = predict(params, features);
    Mask mask(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) mask[i] = p[i] >= threshold ? 1 : 0;
    return mask;
}

namespace {

constexpr const char* kModelMagic = "impdet-mlp";
constexpr int kModelVersion = 1;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class M>
void write_tensor(std::ostream& os, const char* name, const M& t) {
    os << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
        for (Eigen::Index c = 0; c < t.cols(); ++c) os << (c ? " " : "") << fmt17(t(r, c));
        os << '\n';
    }
}

template <class M>
void read_tensor(std::istream& is, const char* name, M& t) {
    std::string tag;
    Eigen::Index rows = 0, cols = 0;
    if (!(is >> tag >> rows >> cols) || tag != name)
        throw std::runtime_error(std::string("model file: expected tensor ") + name);
    if (rows != t.rows() || cols != t.cols())
        throw std::runtime_error(std::string("model file: shape mismatch for ") + name);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            if (!(is >> t(r, c))) throw std::runtime_error(std::string("model file: truncated tensor ") + name);
}

void expect(std::istream& is, const std::string& word) {
    std::string tag;
    if (!(is >> tag) || tag != word) throw std::runtime_error("model file: expected '" + word + "'");
}

}  // namespace

void save_model(std::ostream& os, const MlpParams& params, const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) os << "# " << line << '\n';
    os << kModelMagic << ' ' << kModelVersion << '\n';
    os << "seed " << params.seed << '\n';
    os << "layers " << kInputs << ' ' << kHidden1 << ' ' << kHidden2 << " 1\n";
    os << "norm_mean";
    for (double v : params.normalizer.mean) os << ' ' << fmt17(v);
    os << "\nnorm_std";
    for (double v : params.normalizer.stddev) os << ' ' << fmt17(v);
    os << '\n';
    write_tensor(os, "W1", params.net.W1);
    write_tensor(os, "b1", params.net.b1);
    write_tensor(os, "W2", params.net.W2);
    write_tensor(os, "b2", params.net.b2);
    write_tensor(os, "W3", params.net.W3);
    write_tensor(os, "b3", params.net.b3);
    os << "end\n";
}

MlpParams load_model(std::istream& in) {
    // Skip '#' metadata lines.
    std::stringstream body;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] == '#') continue;
        body << line << '\n';
    }
    MlpParams p;
    std::string magic;
    int version = 0;
    if (!(body >> magic >> version) || magic != kModelMagic) throw std::runtime_error("model file: bad magic");
    if (version != kModelVersion) throw std::runtime_error("model file: unsupported version " + std::to_string(version));
    expect(body, "seed");
    body >> p.seed;
    expect(body, "layers");
    int l0 = 0, l1 = 0, l2 = 0, l3 = 0;
    body >> l0 >> l1 >> l2 >> l3;
    if (l0 != kInputs || l1 != kHidden1 || l2 != kHidden2 || l3 != 1)
        throw std::runtime_error("model file: layer sizes must be 3 20 10 1");
    expect(body, "norm_mean");
    for (auto& v : p.normalizer.mean) body >> v;
    expect(body, "norm_std");
    for (auto& v : p.normalizer.stddev) body >> v;
    read_tensor(body, "W1", p.net.W1);
    read_tensor(body, "b1", p.net.b1);
    read_tensor(body, "W2", p.net.W2);
    read_tensor(body, "b2", p.net.b2);
    read_tensor(body, "W3", p.net.W3);
    read_tensor(body, "b3", p.net.b3);
    expect(body, "end");
    if (!p.net.all_finite()) throw std::runtime_error("model file: non-finite parameters");
    return p;
}

void save_model(const std::string& path, const MlpParams& params, const std::vector<std::string>& metadata) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    save_model(os, params, metadata);
}

MlpParams load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return load_model(is);
}

}  // namespace impdet
