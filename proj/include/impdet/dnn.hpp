#pragma once

// Fully-connected 3-20-10-1 impulse detector: ReLU hidden layers, sigmoid
// output, L2-regularized cross-entropy, Adam, Xavier initialization.

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "impdet/features.hpp"
#include "impdet/rng.hpp"
#include "impdet/types.hpp"

namespace impdet {

inline constexpr int kInputs = 3;
inline constexpr int kHidden1 = 20;
inline constexpr int kHidden2 = 10;

using Batch = Eigen::Matrix<double, kInputs, Eigen::Dynamic>;

/// Weights and biases of the three layers. Also used for gradients and for
/// the Adam moment accumulators, which share the same shapes.
struct MlpTensors {
    Eigen::Matrix<double, kHidden1, kInputs> W1 = Eigen::Matrix<double, kHidden1, kInputs>::Zero();
    Eigen::Matrix<double, kHidden1, 1> b1 = Eigen::Matrix<double, kHidden1, 1>::Zero();
    Eigen::Matrix<double, kHidden2, kHidden1> W2 = Eigen::Matrix<double, kHidden2, kHidden1>::Zero();
    Eigen::Matrix<double, kHidden2, 1> b2 = Eigen::Matrix<double, kHidden2, 1>::Zero();
    Eigen::Matrix<double, 1, kHidden2> W3 = Eigen::Matrix<double, 1, kHidden2>::Zero();
    Eigen::Matrix<double, 1, 1> b3 = Eigen::Matrix<double, 1, 1>::Zero();

    static constexpr std::size_t kParameterCount =
        kHidden1 * kInputs + kHidden1 + kHidden2 * kHidden1 + kHidden2 + kHidden2 + 1;

    /// Visit every tensor in a fixed order (W1, b1, W2, b2, W3, b3).
    template <class F>
    void for_each(F&& f) {
        f(W1); f(b1); f(W2); f(b2); f(W3); f(b3);
    }
    template <class F>
    void for_each(F&& f) const {
        f(W1); f(b1); f(W2); f(b2); f(W3); f(b3);
    }

    /// Column-major concatenation in visiting order.
    std::vector<double> flatten() const;
    void unflatten(std::span<const double> values);
    double weight_square_sum() const;
    bool all_finite() const;
};

struct MlpParams {
    MlpTensors net;
    Normalizer normalizer;
    std::uint64_t seed = 0;
};

double relu(double x);
double sigmoid(double x);

struct ForwardCache {
    Eigen::Matrix<double, kHidden1, Eigen::Dynamic> z1, a1;
    Eigen::Matrix<double, kHidden2, Eigen::Dynamic> z2, a2;
    Eigen::Matrix<double, 1, Eigen::Dynamic> yhat;
};

/// Forward pass on already-normalized inputs, one column per sample.
ForwardCache forward(const MlpTensors& net, const Batch& x);

/// Single normalized input.
double forward(const MlpTensors& net, const std::array<double, 3>& x);

/// Normalizes with params.normalizer, then runs the network.
double predict(const MlpParams& params, const FeatureVector& fv);
std::vector<double> predict(const MlpParams& params, std::span<const FeatureVector> features);

inline constexpr double kProbClamp = 1e-12;

/// Mean binary cross-entropy plus (lambda / 2m) * sum of squared weights
/// (biases excluded), m = batch size. Throws on an empty batch.
double loss(const MlpTensors& net, const Batch& x, std::span<const std::uint8_t> y, double lambda);

/// Analytic gradient of loss(). ReLU derivative at 0 is taken as 0.
MlpTensors backward(const MlpTensors& net, const Batch& x, std::span<const std::uint8_t> y, double lambda);

struct AdamState {
    MlpTensors m;
    MlpTensors v;
    std::uint64_t step = 0;
    double eta = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

void adam_step(AdamState& state, MlpTensors& params, const MlpTensors& grads);

/// Uniform on +-sqrt(6 / (fan_in + fan_out)); fan_in = cols, fan_out = rows.
Eigen::MatrixXd xavier_init(int rows, int cols, Rng& rng);

/// Xavier-initialized weights, zero biases.
MlpTensors init_network(Rng& rng);

struct TrainConfig {
    double eta = 0.01;
    double lambda = 0.1;
    int epochs = 100;
    int batch_size = 256;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TrainResult {
    MlpParams params;
    /// loss_trace[0] is the full-dataset loss before training, entry e the
    /// loss after epoch e.
    std::vector<double> loss_trace;
};

/// Fits the feature normalizer, then runs mini-batch Adam. Batches are drawn
/// from a per-epoch shuffle seeded by cfg.seed. Throws std::runtime_error if
/// the loss becomes non-finite.
TrainResult train(std::span<const FeatureVector> features, std::span<const std::uint8_t> labels, const TrainConfig& cfg);

inline constexpr double kDecisionThreshold = 0.5;

/// 1 iff the network output is >= threshold.
Mask classify(const MlpParams& params, std::span<const FeatureVector> features, double threshold = kDecisionThreshold);

/// Normalizes features into a batch matrix.
Batch make_batch(const Normalizer& norm, std::span<const FeatureVector> features);

/// Versioned plain-text model format; numbers printed with 17 significant digits.
void save_model(std::ostream& os, const MlpParams& params, const std::vector<std::string>& metadata = {});
MlpParams load_model(std::istream& is);
void save_model(const std::string& path, const MlpParams& params, const std::vector<std::string>& metadata = {});
MlpParams load_model(const std::string& path);

}  // namespace impdet
