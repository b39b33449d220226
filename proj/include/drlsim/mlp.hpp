#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "drlsim/rng.hpp"

namespace drlsim::agents {

struct Architecture {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden;
    std::size_t output_dim = 0;

    bool operator==(const Architecture&) const = default;
    std::size_t layer_count() const { return hidden.size() + 1; }
    nlohmann::json to_json() const;
    static Architecture from_json(const nlohmann::json&);
};

/// One affine layer. Weights are f32 row-major (checkpoint precision); all
/// arithmetic on them happens in f64 via the kernel layer.
struct Layer {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> weights;  // rows x cols
    std::vector<float> bias;     // rows
};

/// Multilayer perceptron: affine layers with tanh on hidden outputs and an
/// identity output layer.
struct MlpParams {
    Architecture arch;
    std::vector<Layer> layers;

    std::size_t parameter_count() const;
    bool same_shape(const MlpParams& other) const { return arch == other.arch; }
};

/// Uniform +-1/sqrt(fan_in) initialization (values exactly representable in
/// f32 by construction).
MlpParams make_mlp(const Architecture& arch, Rng& rng);

/// Zeroes the output layer (standard policy-head initialization).
void zero_output_layer(MlpParams& params);

/// Forward pass; `input` length must match arch.input_dim.
std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input);

/// Post-activation values per layer, kept for backprop: acts[0] is the input,
/// acts[k] the output of layer k-1.
struct ForwardCache {
    std::vector<std::vector<double>> acts;
};

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input,
                                ForwardCache& cache);

/// f64 gradient accumulator shaped like an MlpParams.
struct MlpGrads {
    struct LayerGrad {
        std::vector<double> weights;
        std::vector<double> bias;
    };
    std::vector<LayerGrad> layers;

    static MlpGrads zeros_like(const MlpParams& params);
    void scale(double s);
    void add_scaled(const MlpGrads& other, double s);
    double squared_norm() const;
    std::size_t flat_size() const;
    void to_flat(std::span<double> out) const;
    void from_flat(std::span<const double> in);
};

/// Accumulates d(output . upstream)/d(params) into `grads` (reverse mode).
/// `cache` must come from a forward pass of the same params and input.
void mlp_backward(const MlpParams& params, const ForwardCache& cache,
                  std::span<const double> upstream, MlpGrads& grads);

/// Directional derivative of the output with respect to the parameters along
/// `direction` (forward mode over the cached activations).
std::vector<double> mlp_jvp(const MlpParams& params, const ForwardCache& cache,
                            const MlpGrads& direction);

/// Plain momentum SGD with global gradient-norm clipping. Updates are
/// computed in f64 and rounded into the f32 parameters.
class SgdMomentum {
public:
    SgdMomentum(double lr, double momentum = 0.9, double clip_norm = 10.0)
        : lr_(lr), momentum_(momentum), clip_norm_(clip_norm) {}

    void apply(MlpParams& params, const MlpGrads& grads);
    void reset() { velocity_.layers.clear(); }

private:
    double lr_, momentum_, clip_norm_;
    MlpGrads velocity_;
};

}  // namespace drlsim::agents
