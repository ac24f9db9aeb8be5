#include "anchorhull/generator.hpp"

#include <cmath>

#include "anchorhull/rng.hpp"

namespace anchorhull {

void GeneratorConfig::validate() const {
    require(latent_dim >= 1 && hidden_dim >= 1 && output_dim >= 1,
            "GeneratorConfig: dimensions must be >= 1");
    require(num_layers >= 2, "GeneratorConfig: need at least 2 layers, got " +
                                 std::to_string(num_layers));
}

void GeneratorGrads::scale(double s) {
    for (auto& g : latents) g *= s;
    if (!has_weights) return;
    input_const *= s;
    for (auto& g : layer_weights) g *= s;
    for (auto& g : style_weights) g *= s;
    for (auto& g : biases) g *= s;
    readout *= s;
}

void GeneratorGrads::accumulate(const GeneratorGrads& other, double s) {
    for (size_t l = 0; l < latents.size(); ++l) latents[l] += s * other.latents[l];
    if (!has_weights) return;
    input_const += s * other.input_const;
    for (size_t l = 0; l < layer_weights.size(); ++l) {
        layer_weights[l] += s * other.layer_weights[l];
        style_weights[l] += s * other.style_weights[l];
        biases[l] += s * other.biases[l];
    }
    readout += s * other.readout;
}

double GeneratorGrads::weight_dot(const GeneratorGrads& other) const {
    double acc = input_const.dot(other.input_const);
    for (size_t l = 0; l < layer_weights.size(); ++l) {
        acc += layer_weights[l].cwiseProduct(other.layer_weights[l]).sum();
        acc += style_weights[l].cwiseProduct(other.style_weights[l]).sum();
        acc += biases[l].dot(other.biases[l]);
    }
    acc += readout.cwiseProduct(other.readout).sum();
    return acc;
}

LayeredGenerator::LayeredGenerator(GeneratorConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    const int h = cfg_.hidden_dim;
    const int k = cfg_.latent_dim;
    const int L = cfg_.num_layers;
    input_const = VectorXd::Zero(h);
    layer_weights.assign(static_cast<size_t>(L), MatrixXd::Zero(h, h));
    style_weights.assign(static_cast<size_t>(L), MatrixXd::Zero(h, k));
    biases.assign(static_cast<size_t>(L), VectorXd::Zero(h));
    readout = MatrixXd::Zero(cfg_.output_dim, h);
}

LayeredGenerator LayeredGenerator::zero(const GeneratorConfig& cfg) {
    return LayeredGenerator(cfg);
}

LayeredGenerator LayeredGenerator::random(const GeneratorConfig& cfg) {
    LayeredGenerator gen(cfg);
    Rng rng(cfg.seed);
    const double w_std = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_dim));
    const double s_std = 1.0 / std::sqrt(static_cast<double>(cfg.latent_dim));

    for (Eigen::Index i = 0; i < gen.input_const.size(); ++i) gen.input_const[i] = rng.normal();
    for (int l = 0; l < cfg.num_layers; ++l) {
        auto& W = gen.layer_weights[static_cast<size_t>(l)];
        auto& B = gen.style_weights[static_cast<size_t>(l)];
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = w_std * rng.normal();
        for (Eigen::Index r = 0; r < B.rows(); ++r)
            for (Eigen::Index c = 0; c < B.cols(); ++c) B(r, c) = s_std * rng.normal();
        // biases stay zero at init
    }
    for (Eigen::Index r = 0; r < gen.readout.rows(); ++r)
        for (Eigen::Index c = 0; c < gen.readout.cols(); ++c) gen.readout(r, c) = w_std * rng.normal();
    return gen;
}

void LayeredGenerator::check_latent(const LatentCode& w) const {
    if (w.layered()) {
        require(static_cast<int>(w.per_layer.size()) == cfg_.num_layers,
                "LayeredGenerator: latent has " + std::to_string(w.per_layer.size()) +
                    " layer codes, generator has " + std::to_string(cfg_.num_layers));
        for (const auto& v : w.per_layer)
            require(v.size() == cfg_.latent_dim,
                    "LayeredGenerator: layer code length " + std::to_string(v.size()) +
                        " != latent dimension " + std::to_string(cfg_.latent_dim));
    } else {
        require(w.vector.size() == cfg_.latent_dim,
                "LayeredGenerator: latent length " + std::to_string(w.vector.size()) +
                    " != latent dimension " + std::to_string(cfg_.latent_dim));
    }
}

Signal LayeredGenerator::forward(const LatentCode& w) const {
    check_latent(w);
    VectorXd h = input_const;
    for (int l = 0; l < cfg_.num_layers; ++l) {
        VectorXd pre = layer_weights[static_cast<size_t>(l)] * h +
                       style_weights[static_cast<size_t>(l)] * w.layer(l, cfg_.num_layers) +
                       biases[static_cast<size_t>(l)];
        h = cfg_.activation == GeneratorConfig::Activation::Tanh
                ? pre.array().tanh().matrix().eval()
                : pre;
    }
    return Signal(readout * h);
}

GeneratorGrads LayeredGenerator::vjp(const LatentCode& w, const Signal& cotangent,
                                     bool with_weights) const {
    check_latent(w);
    require(cotangent.values.size() == cfg_.output_dim,
            "LayeredGenerator: cotangent length " + std::to_string(cotangent.values.size()) +
                " != output dimension " + std::to_string(cfg_.output_dim));
    const int L = cfg_.num_layers;

    // forward pass, keeping every hidden state
    std::vector<VectorXd> states(static_cast<size_t>(L) + 1);
    states[0] = input_const;
    for (int l = 0; l < L; ++l) {
        VectorXd pre = layer_weights[static_cast<size_t>(l)] * states[static_cast<size_t>(l)] +
                       style_weights[static_cast<size_t>(l)] * w.layer(l, L) +
                       biases[static_cast<size_t>(l)];
        states[static_cast<size_t>(l) + 1] =
            cfg_.activation == GeneratorConfig::Activation::Tanh
                ? pre.array().tanh().matrix().eval()
                : pre;
    }

    GeneratorGrads grads;
    grads.latents.resize(static_cast<size_t>(L));
    grads.has_weights = with_weights;
    if (with_weights) {
        grads.layer_weights.resize(static_cast<size_t>(L));
        grads.style_weights.resize(static_cast<size_t>(L));
        grads.biases.resize(static_cast<size_t>(L));
        grads.readout = cotangent.values * states[static_cast<size_t>(L)].transpose();
    }

    VectorXd h_bar = readout.transpose() * cotangent.values;
    for (int l = L - 1; l >= 0; --l) {
        const VectorXd& h_out = states[static_cast<size_t>(l) + 1];
        VectorXd pre_bar =
            cfg_.activation == GeneratorConfig::Activation::Tanh
                ? (h_bar.array() * (1.0 - h_out.array().square())).matrix().eval()
                : h_bar;
        grads.latents[static_cast<size_t>(l)] =
            style_weights[static_cast<size_t>(l)].transpose() * pre_bar;
        if (with_weights) {
            grads.layer_weights[static_cast<size_t>(l)] =
                pre_bar * states[static_cast<size_t>(l)].transpose();
            grads.style_weights[static_cast<size_t>(l)] =
                pre_bar * w.layer(l, L).transpose();
            grads.biases[static_cast<size_t>(l)] = pre_bar;
        }
        h_bar = layer_weights[static_cast<size_t>(l)].transpose() * pre_bar;
    }
    if (with_weights) grads.input_const = h_bar;
    return grads;
}

LayeredGenerator LayeredGenerator::perturb(double magnitude, uint64_t seed) const {
    require(magnitude >= 0.0, "perturb: magnitude must be non-negative");
    LayeredGenerator out = *this;
    if (magnitude == 0.0) return out;

    Rng rng(seed);
    auto jitter_vec = [&](VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += magnitude * rng.normal();
    };
    auto jitter_mat = [&](MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) += magnitude * rng.normal();
    };
    jitter_vec(out.input_const);
    for (int l = 0; l < cfg_.num_layers; ++l) {
        jitter_mat(out.layer_weights[static_cast<size_t>(l)]);
        jitter_mat(out.style_weights[static_cast<size_t>(l)]);
        jitter_vec(out.biases[static_cast<size_t>(l)]);
    }
    jitter_mat(out.readout);
    return out;
}

void LayeredGenerator::axpy_weights(const GeneratorGrads& grads, double s) {
    require(grads.has_weights, "axpy_weights: gradients lack weight terms");
    input_const += s * grads.input_const;
    for (size_t l = 0; l < layer_weights.size(); ++l) {
        layer_weights[l] += s * grads.layer_weights[l];
        style_weights[l] += s * grads.style_weights[l];
        biases[l] += s * grads.biases[l];
    }
    readout += s * grads.readout;
}

}  // namespace anchorhull
