#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pct/matrix.hpp"

namespace pct {

enum class Activation { relu, identity };

struct Layer {
    Matrix weight;               // out x in
    std::vector<double> bias;    // out
    Activation act = Activation::identity;
};

/// Small fully connected feature extractor with explicit forward/backward
/// state. Parameters are initialized uniformly in [-1/sqrt(fan_in),
/// 1/sqrt(fan_in)] from stream `layer index` of the init seed.
struct DenseNet {
    std::vector<Layer> layers;
    std::uint64_t seed = 0;
    std::uint64_t version = 0;  // bumped on every parameter mutation

    std::size_t in_dim() const { return layers.front().weight.cols(); }
    std::size_t out_dim() const { return layers.back().weight.rows(); }
    void touch() { ++version; }
};

/// dims = {in, h1, ..., out}; acts has one entry per layer.
DenseNet make_dense(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                    std::uint64_t seed);

struct Tape {
    std::uint64_t net_version = 0;
    Matrix input;
    std::vector<Matrix> preacts;
    std::vector<Matrix> outputs;
};

struct ForwardResult {
    Matrix features;  // B x out_dim
    Tape tape;
};

ForwardResult forward(const DenseNet& net, const Matrix& batch);

struct NetGrads {
    std::vector<Matrix> d_weight;
    std::vector<std::vector<double>> d_bias;
    Matrix d_input;
};

/// Exact reverse-mode gradients; ReLU subgradient at 0 is 0. Throws when the
/// tape was recorded against an older parameter version.
NetGrads backward(const DenseNet& net, const Tape& tape, const Matrix& grad_out);

struct SoftmaxHead {
    Matrix weight;             // classes x features
    std::vector<double> bias;  // classes
    std::size_t classes() const { return weight.rows(); }
};

SoftmaxHead make_head(std::size_t classes, std::size_t features, std::uint64_t seed);

struct XentResult {
    double loss = 0.0;
    Matrix d_weight;
    std::vector<double> d_bias;
    Matrix d_features;
};

/// Mean cross-entropy of softmax(head(features)) with log-sum-exp
/// stabilization.
XentResult softmax_xent(const SoftmaxHead& head, const Matrix& features,
                        const std::vector<std::int64_t>& labels);

Matrix head_logits(const SoftmaxHead& head, const Matrix& features);

double accuracy(const SoftmaxHead& head, const Matrix& features,
                const std::vector<std::int64_t>& labels);

// ---------------------------------------------------------------------------
// Optimizers

struct SgdSpec {
    double lr = 0.05;
    double momentum = 0.0;
    bool nesterov = false;
    double weight_decay = 0.0;  // added to the gradient (coupled)
};

struct AdamSpec {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

using OptimizerSpec = std::variant<SgdSpec, AdamSpec>;

struct ParamRef {
    double* data = nullptr;
    std::size_t n = 0;
};

struct GradRef {
    const double* data = nullptr;
    std::size_t n = 0;
};

class OptimizerState {
public:
    explicit OptimizerState(OptimizerSpec spec) : spec_(spec) {}

    /// One update over a fixed parameter list; buffers are lazily shaped on
    /// the first call and must keep matching afterwards.
    void step(const std::vector<ParamRef>& params, const std::vector<GradRef>& grads);

    std::uint64_t step_count() const { return step_; }
    const OptimizerSpec& spec() const { return spec_; }

private:
    OptimizerSpec spec_;
    std::uint64_t step_ = 0;
    std::vector<std::vector<double>> buf_m_;  // momentum (sgd) or first moment
    std::vector<std::vector<double>> buf_v_;  // second moment (adam)
};

std::vector<ParamRef> param_refs(DenseNet& net);
std::vector<ParamRef> param_refs(SoftmaxHead& head);
std::vector<GradRef> grad_refs(const NetGrads& grads);

// ---------------------------------------------------------------------------
// Checkpoints: text format, bit-exact round trip.

void save_dense(const DenseNet& net, const std::string& path, std::uint64_t step = 0);
DenseNet load_dense(const std::string& path);

}  // namespace pct
