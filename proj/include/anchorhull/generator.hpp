#pragma once

#include <cstdint>
#include <vector>

#include "anchorhull/types.hpp"

namespace anchorhull {

struct GeneratorConfig {
    int latent_dim = 16;  // k
    int num_layers = 6;   // L
    int hidden_dim = 32;  // h
    int output_dim = 64;  // d, flattened signal length
    uint64_t seed = 0;

    enum class Activation { Tanh, Identity };
    Activation activation = Activation::Tanh;

    void validate() const;
};

/// Gradients returned by LayeredGenerator::vjp. `latents` is always filled
/// (one k-vector per layer); the weight fields only when requested.
struct GeneratorGrads {
    std::vector<VectorXd> latents;

    bool has_weights = false;
    VectorXd input_const;
    std::vector<MatrixXd> layer_weights;
    std::vector<MatrixXd> style_weights;
    std::vector<VectorXd> biases;
    MatrixXd readout;

    void scale(double s);
    void accumulate(const GeneratorGrads& other, double s);
    double weight_dot(const GeneratorGrads& other) const;
};

/// Small layered generator: h_0 = c, h_l = act(W_l h_{l-1} + B_l w_l + b_l),
/// output = C h_L. Each layer takes its own style code, so the same
/// architecture serves both shared-latent and per-layer-latent use.
/// Weights are immutable during forward/vjp; tuning works on a copy.
class LayeredGenerator {
public:
    // Scaled-Gaussian init (std 1/sqrt(fan-in), biases zero), seeded by cfg.seed.
    static LayeredGenerator random(const GeneratorConfig& cfg);
    // All weights zero; forward maps everything to the zero signal.
    static LayeredGenerator zero(const GeneratorConfig& cfg);

    const GeneratorConfig& config() const { return cfg_; }

    Signal forward(const LatentCode& w) const;

    // Gradients of <cotangent, forward(w)> with respect to each layer's
    // style input and, when with_weights is set, every weight tensor.
    GeneratorGrads vjp(const LatentCode& w, const Signal& cotangent,
                       bool with_weights = true) const;

    // Copy with seeded Gaussian noise of the given std added to every
    // weight. Magnitude 0 returns a bit-identical copy.
    LayeredGenerator perturb(double magnitude, uint64_t seed) const;

    // weights += s * grads (requires grads.has_weights)
    void axpy_weights(const GeneratorGrads& grads, double s);

    // weight tensors, exposed for tuning and serialization
    VectorXd input_const;                 // c, h
    std::vector<MatrixXd> layer_weights;  // W_l, h x h
    std::vector<MatrixXd> style_weights;  // B_l, h x k
    std::vector<VectorXd> biases;         // b_l, h
    MatrixXd readout;                     // C, d x h

private:
    explicit LayeredGenerator(GeneratorConfig cfg);
    void check_latent(const LatentCode& w) const;

    GeneratorConfig cfg_;
};

}  // namespace anchorhull
