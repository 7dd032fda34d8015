#include "xmtf/net.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace xmtf::nn {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::identity: return "identity";
        case Activation::sigmoid: return "sigmoid";
    }
    return "identity";
}

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "identity") return Activation::identity;
    if (name == "sigmoid") return Activation::sigmoid;
    throw ContractViolation("unknown activation: " + name);
}

std::int64_t DenseNet::parameter_count() const {
    std::int64_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

DenseNet make_net(int input_dim, const std::vector<int>& hidden, int output_dim,
                  Activation hidden_activation, Activation output_activation,
                  std::mt19937_64& rng) {
    require(input_dim > 0 && output_dim > 0, "make_net: dimensions must be positive");
    std::vector<int> dims;
    dims.push_back(input_dim);
    for (int h : hidden) {
        require(h > 0, "make_net: hidden widths must be positive");
        dims.push_back(h);
    }
    dims.push_back(output_dim);

    DenseNet net;
    net.layers.reserve(dims.size() - 1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        int fan_in = dims[l], fan_out = dims[l + 1];
        double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> uni(-bound, bound);
        Layer layer;
        layer.weights = Mat(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = uni(rng);
        layer.bias = Vec::Zero(fan_out);
        layer.activation = (l + 2 == dims.size()) ? output_activation : hidden_activation;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

void validate(const DenseNet& net) {
    require(!net.layers.empty(), "net has no layers");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        require(layer.weights.rows() == layer.bias.size(),
                "layer " + std::to_string(l) + ": bias/weight row mismatch");
        require(layer.weights.allFinite() && layer.bias.allFinite(),
                "layer " + std::to_string(l) + ": non-finite parameters");
        if (l > 0)
            require(net.layers[l - 1].weights.rows() == layer.weights.cols(),
                    "layer " + std::to_string(l) + ": dimension chain broken");
    }
}

namespace {

inline void apply_activation(Activation act, Mat& z) {
    switch (act) {
        case Activation::relu:
            z = z.cwiseMax(0.0);
            break;
        case Activation::tanh:
            z = z.array().tanh().matrix();
            break;
        case Activation::sigmoid:
            z = (1.0 / (1.0 + (-z.array()).exp())).matrix();
            break;
        case Activation::identity:
            break;
    }
}

// Derivative expressed through the post-activation value a = act(z).
inline Mat activation_grad_from_output(Activation act, const Mat& a) {
    switch (act) {
        case Activation::relu:
            return (a.array() > 0.0).cast<double>().matrix();
        case Activation::tanh:
            return (1.0 - a.array().square()).matrix();
        case Activation::sigmoid:
            return (a.array() * (1.0 - a.array())).matrix();
        case Activation::identity:
            return Mat::Ones(a.rows(), a.cols());
    }
    return Mat::Ones(a.rows(), a.cols());
}

}  // namespace

Mat forward_batch(const DenseNet& net, const Mat& x) {
    require(!net.layers.empty(), "forward: net has no layers");
    require(x.rows() == net.input_dim(), "forward: input dimension mismatch (got " +
                                             std::to_string(x.rows()) + ", want " +
                                             std::to_string(net.input_dim()) + ")");
    require(x.allFinite(), "forward: non-finite input");
    Mat a = x;
    for (const auto& layer : net.layers) {
        Mat z = layer.weights * a;
        z.colwise() += layer.bias;
        apply_activation(layer.activation, z);
        a = std::move(z);
    }
    return a;
}

Vec forward(const DenseNet& net, const Vec& x) { return forward_batch(net, x).col(0); }

NetGrad NetGrad::zeros_like(const DenseNet& net) {
    NetGrad g;
    g.d_weights.reserve(net.layers.size());
    g.d_bias.reserve(net.layers.size());
    for (const auto& layer : net.layers) {
        g.d_weights.emplace_back(Mat::Zero(layer.weights.rows(), layer.weights.cols()));
        g.d_bias.emplace_back(Vec::Zero(layer.bias.size()));
    }
    return g;
}

void NetGrad::add_scaled(const NetGrad& other, double scale) {
    for (std::size_t l = 0; l < d_weights.size(); ++l) {
        d_weights[l] += scale * other.d_weights[l];
        d_bias[l] += scale * other.d_bias[l];
    }
}

void NetGrad::scale(double factor) {
    for (std::size_t l = 0; l < d_weights.size(); ++l) {
        d_weights[l] *= factor;
        d_bias[l] *= factor;
    }
}

BackwardResult backward_batch(const DenseNet& net, const Mat& x, const Mat& out_grad) {
    require(out_grad.rows() == net.output_dim(), "backward: out_grad dimension mismatch");
    require(out_grad.cols() == x.cols(), "backward: batch size mismatch");

    const std::size_t n_layers = net.layers.size();
    std::vector<Mat> activations(n_layers + 1);
    activations[0] = x;
    require(x.rows() == net.input_dim(), "backward: input dimension mismatch");
    for (std::size_t l = 0; l < n_layers; ++l) {
        Mat z = net.layers[l].weights * activations[l];
        z.colwise() += net.layers[l].bias;
        apply_activation(net.layers[l].activation, z);
        activations[l + 1] = std::move(z);
    }

    BackwardResult result;
    result.grads.d_weights.resize(n_layers);
    result.grads.d_bias.resize(n_layers);

    Mat delta = out_grad.cwiseProduct(activation_grad_from_output(
        net.layers[n_layers - 1].activation, activations[n_layers]));
    for (std::size_t l = n_layers; l-- > 0;) {
        result.grads.d_weights[l] = delta * activations[l].transpose();
        result.grads.d_bias[l] = delta.rowwise().sum();
        Mat upstream = net.layers[l].weights.transpose() * delta;
        if (l == 0) {
            result.input_grad = std::move(upstream);
        } else {
            delta = upstream.cwiseProduct(
                activation_grad_from_output(net.layers[l - 1].activation, activations[l]));
        }
    }
    return result;
}

VectorBackwardResult backward(const DenseNet& net, const Vec& x, const Vec& out_grad) {
    BackwardResult br = backward_batch(net, x, out_grad);
    return {std::move(br.grads), br.input_grad.col(0)};
}

AdamState AdamState::zeros_like(const DenseNet& net) {
    AdamState s;
    for (const auto& layer : net.layers) {
        s.m_weights.emplace_back(Mat::Zero(layer.weights.rows(), layer.weights.cols()));
        s.v_weights.emplace_back(Mat::Zero(layer.weights.rows(), layer.weights.cols()));
        s.m_bias.emplace_back(Vec::Zero(layer.bias.size()));
        s.v_bias.emplace_back(Vec::Zero(layer.bias.size()));
    }
    return s;
}

namespace {

void check_finite_grad(const Mat& g, const std::string& path) {
    if (g.allFinite()) return;
    for (int r = 0; r < g.rows(); ++r)
        for (int c = 0; c < g.cols(); ++c)
            if (!std::isfinite(g(r, c)))
                throw ContractViolation("adam_step: non-finite gradient at " + path + "(" +
                                        std::to_string(r) + "," + std::to_string(c) + ")");
}

}  // namespace

void adam_step(DenseNet& net, const NetGrad& grads, AdamState& state, double lr) {
    require(lr > 0.0, "adam_step: lr must be positive");
    require(grads.d_weights.size() == net.layers.size(), "adam_step: gradient shape mismatch");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        require(grads.d_weights[l].rows() == net.layers[l].weights.rows() &&
                    grads.d_weights[l].cols() == net.layers[l].weights.cols() &&
                    grads.d_bias[l].size() == net.layers[l].bias.size(),
                "adam_step: gradient shape mismatch at layer " + std::to_string(l));
        check_finite_grad(grads.d_weights[l], "layer " + std::to_string(l) + " weights");
        check_finite_grad(grads.d_bias[l], "layer " + std::to_string(l) + " bias");
    }

    ++state.step_count;
    const double b1 = state.beta1, b2 = state.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto update = [&](Mat& param, const Mat& g, Mat& m, Mat& v) {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
            Mat m_hat = m / corr1;
            Mat v_hat = v / corr2;
            param -= lr * m_hat.cwiseQuotient(v_hat.cwiseSqrt() +
                                              Mat::Constant(v.rows(), v.cols(), state.epsilon));
        };
        update(net.layers[l].weights, grads.d_weights[l], state.m_weights[l], state.v_weights[l]);
        Vec& b = net.layers[l].bias;
        Vec& mb = state.m_bias[l];
        Vec& vb = state.v_bias[l];
        const Vec& gb = grads.d_bias[l];
        mb = b1 * mb + (1.0 - b1) * gb;
        vb = b2 * vb + (1.0 - b2) * gb.cwiseProduct(gb);
        b -= lr * (mb / corr1).cwiseQuotient((vb / corr2).cwiseSqrt() +
                                             Vec::Constant(vb.size(), state.epsilon));
    }
}

namespace {

std::vector<double> row_major(const Mat& m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
}

Mat from_row_major(const std::vector<double>& data, int rows, int cols) {
    require(static_cast<int>(data.size()) == rows * cols, "net_from_json: weight array size mismatch");
    Mat m(rows, cols);
    std::size_t i = 0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = data[i++];
    return m;
}

}  // namespace

nlohmann::json net_to_json(const DenseNet& net) {
    nlohmann::json j;
    j["format"] = "xmtf-net-v1";
    j["input_dim"] = net.input_dim();
    j["output_dim"] = net.output_dim();
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : net.layers) {
        layers.push_back({{"in", layer.weights.cols()},
                          {"out", layer.weights.rows()},
                          {"activation", to_string(layer.activation)},
                          {"weights_row_major", row_major(layer.weights)},
                          {"bias", std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())}});
    }
    j["layers"] = std::move(layers);
    return j;
}

DenseNet net_from_json(const nlohmann::json& j) {
    require(j.value("format", "") == "xmtf-net-v1", "net_from_json: unknown format");
    DenseNet net;
    for (const auto& lj : j.at("layers")) {
        Layer layer;
        int rows = lj.at("out").get<int>();
        int cols = lj.at("in").get<int>();
        layer.weights = from_row_major(lj.at("weights_row_major").get<std::vector<double>>(), rows, cols);
        auto bias = lj.at("bias").get<std::vector<double>>();
        require(static_cast<int>(bias.size()) == rows, "net_from_json: bias size mismatch");
        layer.bias = Eigen::Map<const Vec>(bias.data(), rows);
        layer.activation = activation_from_string(lj.at("activation").get<std::string>());
        net.layers.push_back(std::move(layer));
    }
    validate(net);
    return net;
}

nlohmann::json adam_to_json(const AdamState& state) {
    nlohmann::json j;
    j["step_count"] = state.step_count;
    j["beta1"] = state.beta1;
    j["beta2"] = state.beta2;
    j["epsilon"] = state.epsilon;
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < state.m_weights.size(); ++l) {
        layers.push_back({{"m_weights", row_major(state.m_weights[l])},
                          {"v_weights", row_major(state.v_weights[l])},
                          {"m_bias", std::vector<double>(state.m_bias[l].data(),
                                                         state.m_bias[l].data() + state.m_bias[l].size())},
                          {"v_bias", std::vector<double>(state.v_bias[l].data(),
                                                         state.v_bias[l].data() + state.v_bias[l].size())}});
    }
    j["layers"] = std::move(layers);
    return j;
}

AdamState adam_from_json(const nlohmann::json& j, const DenseNet& net) {
    AdamState s;
    s.step_count = j.at("step_count").get<std::int64_t>();
    s.beta1 = j.at("beta1").get<double>();
    s.beta2 = j.at("beta2").get<double>();
    s.epsilon = j.at("epsilon").get<double>();
    const auto& layers = j.at("layers");
    require(layers.size() == net.layers.size(), "adam_from_json: layer count mismatch");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        int rows = static_cast<int>(net.layers[l].weights.rows());
        int cols = static_cast<int>(net.layers[l].weights.cols());
        s.m_weights.push_back(from_row_major(layers[l].at("m_weights").get<std::vector<double>>(), rows, cols));
        s.v_weights.push_back(from_row_major(layers[l].at("v_weights").get<std::vector<double>>(), rows, cols));
        auto mb = layers[l].at("m_bias").get<std::vector<double>>();
        auto vb = layers[l].at("v_bias").get<std::vector<double>>();
        s.m_bias.push_back(Eigen::Map<const Vec>(mb.data(), static_cast<int>(mb.size())));
        s.v_bias.push_back(Eigen::Map<const Vec>(vb.data(), static_cast<int>(vb.size())));
    }
    return s;
}

}  // namespace xmtf::nn
