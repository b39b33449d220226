#include "drlsim/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "drlsim/errors.hpp"
#include "drlsim/kernels.hpp"

namespace drlsim::agents {

nlohmann::json Architecture::to_json() const {
    return {{"input", input_dim}, {"hidden", hidden}, {"output", output_dim}};
}

Architecture Architecture::from_json(const nlohmann::json& j) {
    Architecture a;
    a.input_dim = j.at("input").get<std::size_t>();
    a.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    a.output_dim = j.at("output").get<std::size_t>();
    return a;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

MlpParams make_mlp(const Architecture& arch, Rng& rng) {
    if (arch.input_dim == 0 || arch.output_dim == 0)
        throw std::invalid_argument("architecture dims must be > 0");
    MlpParams p;
    p.arch = arch;
    std::size_t fan_in = arch.input_dim;
    std::vector<std::size_t> widths = arch.hidden;
    widths.push_back(arch.output_dim);
    for (const std::size_t rows : widths) {
        Layer layer;
        layer.rows = rows;
        layer.cols = fan_in;
        layer.weights.resize(rows * fan_in);
        layer.bias.assign(rows, 0.0f);
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (float& w : layer.weights) w = static_cast<float>(rng.uniform(-bound, bound));
        p.layers.push_back(std::move(layer));
        fan_in = rows;
    }
    return p;
}

void zero_output_layer(MlpParams& params) {
    Layer& last = params.layers.back();
    std::fill(last.weights.begin(), last.weights.end(), 0.0f);
    std::fill(last.bias.begin(), last.bias.end(), 0.0f);
}

namespace {

void check_input(const MlpParams& p, std::span<const double> input) {
    if (input.size() != p.arch.input_dim)
        throw ContractViolation("input size does not match architecture");
}

std::vector<double> layer_out(const Layer& layer, const std::vector<double>& in, bool last) {
    std::vector<double> bias(layer.rows);
    for (std::size_t i = 0; i < layer.rows; ++i) bias[i] = static_cast<double>(layer.bias[i]);
    std::vector<double> out(layer.rows);
    kernels::ops().matvec(layer.weights.data(), in.data(), bias.data(), out.data(), layer.rows,
                          layer.cols);
    if (!last)
        for (double& v : out) v = std::tanh(v);
    return out;
}

}  // namespace

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input) {
    check_input(params, input);
    std::vector<double> act(input.begin(), input.end());
    for (std::size_t l = 0; l < params.layers.size(); ++l)
        act = layer_out(params.layers[l], act, l + 1 == params.layers.size());
    return act;
}

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input,
                                ForwardCache& cache) {
    check_input(params, input);
    cache.acts.assign(1, std::vector<double>(input.begin(), input.end()));
    for (std::size_t l = 0; l < params.layers.size(); ++l)
        cache.acts.push_back(
            layer_out(params.layers[l], cache.acts.back(), l + 1 == params.layers.size()));
    return cache.acts.back();
}

MlpGrads MlpGrads::zeros_like(const MlpParams& params) {
    MlpGrads g;
    g.layers.resize(params.layers.size());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        g.layers[l].weights.assign(params.layers[l].weights.size(), 0.0);
        g.layers[l].bias.assign(params.layers[l].bias.size(), 0.0);
    }
    return g;
}

void MlpGrads::scale(double s) {
    for (LayerGrad& l : layers) {
        for (double& v : l.weights) v *= s;
        for (double& v : l.bias) v *= s;
    }
}

void MlpGrads::add_scaled(const MlpGrads& other, double s) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        kernels::ops().axpy(s, other.layers[l].weights.data(), layers[l].weights.data(),
                            layers[l].weights.size());
        kernels::ops().axpy(s, other.layers[l].bias.data(), layers[l].bias.data(),
                            layers[l].bias.size());
    }
}

double MlpGrads::squared_norm() const {
    double n = 0.0;
    for (const LayerGrad& l : layers) {
        n += kernels::ops().dot(l.weights.data(), l.weights.data(), l.weights.size());
        n += kernels::ops().dot(l.bias.data(), l.bias.data(), l.bias.size());
    }
    return n;
}

std::size_t MlpGrads::flat_size() const {
    std::size_t n = 0;
    for (const LayerGrad& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

void MlpGrads::to_flat(std::span<double> out) const {
    std::size_t k = 0;
    for (const LayerGrad& l : layers) {
        for (const double v : l.weights) out[k++] = v;
        for (const double v : l.bias) out[k++] = v;
    }
}

void MlpGrads::from_flat(std::span<const double> in) {
    std::size_t k = 0;
    for (LayerGrad& l : layers) {
        for (double& v : l.weights) v = in[k++];
        for (double& v : l.bias) v = in[k++];
    }
}

void mlp_backward(const MlpParams& params, const ForwardCache& cache,
                  std::span<const double> upstream, MlpGrads& grads) {
    if (cache.acts.size() != params.layers.size() + 1)
        throw ContractViolation("forward cache does not match architecture");
    if (upstream.size() != params.arch.output_dim)
        throw ContractViolation("upstream size does not match output dim");
    if (grads.layers.size() != params.layers.size()) grads = MlpGrads::zeros_like(params);

    const auto& ops = kernels::ops();
    std::vector<double> delta(upstream.begin(), upstream.end());
    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const Layer& layer = params.layers[l];
        const std::vector<double>& in_act = cache.acts[l];
        ops.outer_acc(delta.data(), in_act.data(), grads.layers[l].weights.data(), layer.rows,
                      layer.cols);
        ops.axpy(1.0, delta.data(), grads.layers[l].bias.data(), layer.rows);
        if (l == 0) break;
        std::vector<double> prev(layer.cols, 0.0);
        ops.matvec_t_acc(layer.weights.data(), delta.data(), prev.data(), layer.rows, layer.cols);
        // tanh derivative via the cached post-activation values
        for (std::size_t j = 0; j < prev.size(); ++j) prev[j] *= 1.0 - in_act[j] * in_act[j];
        delta = std::move(prev);
    }
}

std::vector<double> mlp_jvp(const MlpParams& params, const ForwardCache& cache,
                            const MlpGrads& direction) {
    if (cache.acts.size() != params.layers.size() + 1)
        throw ContractViolation("forward cache does not match architecture");
    const auto& ops = kernels::ops();
    std::vector<double> tangent;  // tangent of the current activation
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const Layer& layer = params.layers[l];
        const std::vector<double>& in_act = cache.acts[l];
        const std::vector<double>& out_act = cache.acts[l + 1];
        // d(pre) = dW . x + db + W . dx
        std::vector<double> dpre(layer.rows, 0.0);
        for (std::size_t i = 0; i < layer.rows; ++i) {
            dpre[i] = direction.layers[l].bias[i] +
                      ops.dot(direction.layers[l].weights.data() + i * layer.cols, in_act.data(),
                              layer.cols);
        }
        if (l > 0) {
            std::vector<double> wdx(layer.rows);
            // W . dx with f32 weights
            std::vector<double> zero_bias(layer.rows, 0.0);
            ops.matvec(layer.weights.data(), tangent.data(), zero_bias.data(), wdx.data(),
                       layer.rows, layer.cols);
            for (std::size_t i = 0; i < layer.rows; ++i) dpre[i] += wdx[i];
        }
        if (l + 1 < params.layers.size()) {
            for (std::size_t i = 0; i < layer.rows; ++i)
                dpre[i] *= 1.0 - out_act[i] * out_act[i];  // tanh'
        }
        tangent = std::move(dpre);
    }
    return tangent;
}

void SgdMomentum::apply(MlpParams& params, const MlpGrads& grads) {
    if (velocity_.layers.empty()) velocity_ = MlpGrads::zeros_like(params);
    double scale = 1.0;
    const double norm = std::sqrt(grads.squared_norm());
    if (!std::isfinite(norm)) throw NumericalError("non-finite gradient norm");
    if (norm > clip_norm_ && norm > 0.0) scale = clip_norm_ / norm;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        Layer& layer = params.layers[l];
        auto& vel = velocity_.layers[l];
        const auto& g = grads.layers[l];
        for (std::size_t i = 0; i < layer.weights.size(); ++i) {
            vel.weights[i] = momentum_ * vel.weights[i] + scale * g.weights[i];
            layer.weights[i] =
                static_cast<float>(static_cast<double>(layer.weights[i]) - lr_ * vel.weights[i]);
        }
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
            vel.bias[i] = momentum_ * vel.bias[i] + scale * g.bias[i];
            layer.bias[i] =
                static_cast<float>(static_cast<double>(layer.bias[i]) - lr_ * vel.bias[i]);
        }
    }
}

}  // namespace drlsim::agents
