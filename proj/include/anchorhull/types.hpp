#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace anchorhull {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Flattened output of the generator. Values are unitless intensities,
/// nominally in [-1, 1] (tanh-bounded network, linear readout).
struct Signal {
    VectorXd values;

    Signal() = default;
    explicit Signal(VectorXd v) : values(std::move(v)) {}
    Eigen::Index size() const { return values.size(); }
};

/// A point in latent space. `vector` is the shared k-dimensional code;
/// `per_layer` optionally holds one code per generator layer.
struct LatentCode {
    VectorXd vector;
    std::vector<VectorXd> per_layer;

    LatentCode() = default;
    explicit LatentCode(VectorXd w) : vector(std::move(w)) {}
    explicit LatentCode(std::vector<VectorXd> layers) : per_layer(std::move(layers)) {
        if (!per_layer.empty()) vector = per_layer.front();
    }

    bool layered() const { return !per_layer.empty(); }

    // Code fed to layer l when the generator has `num_layers` layers.
    const VectorXd& layer(int l, int num_layers) const {
        if (per_layer.empty()) return vector;
        if (static_cast<int>(per_layer.size()) != num_layers)
            throw std::invalid_argument("LatentCode: per_layer count " +
                                        std::to_string(per_layer.size()) + " != layer count " +
                                        std::to_string(num_layers));
        return per_layer[static_cast<size_t>(l)];
    }
};

inline bool all_finite(const VectorXd& v) { return v.allFinite(); }
inline bool all_finite(const MatrixXd& m) { return m.allFinite(); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace anchorhull
