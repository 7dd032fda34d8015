#pragma once

// Minimal dense-network substrate: forward evaluation, exact reverse-mode
// gradients, and Adam. Shared by the fusion cells, the actor, and the critic.
// Eigen supplies the matrix arithmetic; differentiation is done here.

#include "xmtf/common.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace xmtf::nn {

enum class Activation { relu, tanh, identity, sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct Layer {
    Mat weights;  // out x in
    Vec bias;     // out
    Activation activation = Activation::identity;
};

/// A plain-value MLP. Adjacent layer dimensions must chain; all parameters
/// finite. Safe to copy/move freely; concurrent mutation of one instance is
/// not supported.
struct DenseNet {
    std::vector<Layer> layers;

    int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weights.cols()); }
    int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weights.rows()); }
    std::int64_t parameter_count() const;
};

/// Builds a net with the given hidden widths, uniform Glorot weights
/// (+-sqrt(6/(fan_in+fan_out))) and zero biases. Hidden layers use
/// `hidden_activation`; the final layer uses `output_activation`.
DenseNet make_net(int input_dim, const std::vector<int>& hidden, int output_dim,
                  Activation hidden_activation, Activation output_activation,
                  std::mt19937_64& rng);

void validate(const DenseNet& net);

/// Forward pass; pure, never mutates the net.
Vec forward(const DenseNet& net, const Vec& x);

/// Column-batched forward: X is input_dim x batch.
Mat forward_batch(const DenseNet& net, const Mat& x);

struct NetGrad {
    std::vector<Mat> d_weights;
    std::vector<Vec> d_bias;

    static NetGrad zeros_like(const DenseNet& net);
    void add_scaled(const NetGrad& other, double scale);
    void scale(double factor);
};

struct BackwardResult {
    NetGrad grads;   // summed over batch columns
    Mat input_grad;  // input_dim x batch
};

/// Exact reverse-mode gradients for the piecewise-smooth net. The relu
/// subgradient at exactly 0 is 0. out_grad columns are the output cotangents.
BackwardResult backward_batch(const DenseNet& net, const Mat& x, const Mat& out_grad);

struct VectorBackwardResult {
    NetGrad grads;
    Vec input_grad;
};
VectorBackwardResult backward(const DenseNet& net, const Vec& x, const Vec& out_grad);

/// Per-parameter Adam moments mirroring a net's layer shapes.
struct AdamState {
    std::vector<Mat> m_weights, v_weights;
    std::vector<Vec> m_bias, v_bias;
    std::int64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState zeros_like(const DenseNet& net);
};

/// Bias-corrected Adam update in place. Rejects non-finite gradients with an
/// error naming the offending parameter path; the net is left untouched in
/// that case.
void adam_step(DenseNet& net, const NetGrad& grads, AdamState& state, double lr);

/// JSON snapshot: topology, row-major weight arrays, optional optimizer state,
/// RNG seed and step counter. See README for the schema.
nlohmann::json net_to_json(const DenseNet& net);
DenseNet net_from_json(const nlohmann::json& j);
nlohmann::json adam_to_json(const AdamState& state);
AdamState adam_from_json(const nlohmann::json& j, const DenseNet& net);

}  // namespace xmtf::nn
