#include "anchorhull/degradation.hpp"

#include <cmath>

namespace anchorhull {

namespace {

// Side length of a square grid holding d values; throws when d is not a
// perfect square or the downsampling factor does not divide the side.
int grid_side(Eigen::Index d, int factor, const char* what) {
    const int side = static_cast<int>(std::llround(std::sqrt(static_cast<double>(d))));
    if (static_cast<Eigen::Index>(side) * side != d)
        throw std::invalid_argument(std::string(what) + ": signal length " + std::to_string(d) +
                                    " is not a square grid");
    if (side % factor != 0)
        throw std::invalid_argument(std::string(what) + ": factor " + std::to_string(factor) +
                                    " does not divide grid side " + std::to_string(side));
    return side;
}

}  // namespace

DegradationOp DegradationOp::identity() { return DegradationOp(Kind::Identity, {}, 1); }

DegradationOp DegradationOp::mask(VectorXd m) {
    require(m.size() >= 1, "DegradationOp::mask: empty mask");
    for (Eigen::Index i = 0; i < m.size(); ++i)
        require(m[i] == 0.0 || m[i] == 1.0,
                "DegradationOp::mask: entry " + std::to_string(i) + " is not 0 or 1");
    return DegradationOp(Kind::Mask, std::move(m), 1);
}

DegradationOp DegradationOp::downsample(int factor) {
    require(factor >= 1, "DegradationOp::downsample: factor must be >= 1");
    return DegradationOp(Kind::Downsample, {}, factor);
}

Signal apply(const DegradationOp& op, const Signal& x) {
    switch (op.kind()) {
        case DegradationOp::Kind::Identity:
            return x;
        case DegradationOp::Kind::Mask:
            require(x.size() == op.mask_values().size(),
                    "apply: signal length " + std::to_string(x.size()) + " != mask length " +
                        std::to_string(op.mask_values().size()));
            return Signal(x.values.cwiseProduct(op.mask_values()));
        case DegradationOp::Kind::Downsample: {
            const int f = op.factor();
            const int side = grid_side(x.size(), f, "apply");
            const int out_side = side / f;
            VectorXd out(static_cast<Eigen::Index>(out_side) * out_side);
            const double inv_area = 1.0 / (static_cast<double>(f) * f);
            for (int u = 0; u < out_side; ++u) {
                for (int v = 0; v < out_side; ++v) {
                    double acc = 0.0;
                    for (int a = 0; a < f; ++a)
                        for (int b = 0; b < f; ++b)
                            acc += x.values[(u * f + a) * side + (v * f + b)];
                    out[u * out_side + v] = acc * inv_area;
                }
            }
            return Signal(std::move(out));
        }
    }
    throw std::logic_error("apply: unknown degradation kind");
}

Signal adjoint_apply(const DegradationOp& op, const Signal& y) {
    switch (op.kind()) {
        case DegradationOp::Kind::Identity:
            return y;
        case DegradationOp::Kind::Mask:
            require(y.size() == op.mask_values().size(),
                    "adjoint_apply: signal length " + std::to_string(y.size()) +
                        " != mask length " + std::to_string(op.mask_values().size()));
            return Signal(y.values.cwiseProduct(op.mask_values()));
        case DegradationOp::Kind::Downsample: {
            const int f = op.factor();
            const int out_side = grid_side(y.size(), 1, "adjoint_apply");
            const int side = out_side * f;
            VectorXd out(static_cast<Eigen::Index>(side) * side);
            const double inv_area = 1.0 / (static_cast<double>(f) * f);
            for (int u = 0; u < out_side; ++u)
                for (int v = 0; v < out_side; ++v) {
                    const double val = y.values[u * out_side + v] * inv_area;
                    for (int a = 0; a < f; ++a)
                        for (int b = 0; b < f; ++b)
                            out[(u * f + a) * side + (v * f + b)] = val;
                }
            return Signal(std::move(out));
        }
    }
    throw std::logic_error("adjoint_apply: unknown degradation kind");
}

Eigen::Index degraded_size(const DegradationOp& op, Eigen::Index d) {
    switch (op.kind()) {
        case DegradationOp::Kind::Identity:
            return d;
        case DegradationOp::Kind::Mask:
            return op.mask_values().size();
        case DegradationOp::Kind::Downsample: {
            const int side = grid_side(d, op.factor(), "degraded_size");
            const Eigen::Index out_side = side / op.factor();
            return out_side * out_side;
        }
    }
    throw std::logic_error("degraded_size: unknown degradation kind");
}

}  // namespace anchorhull
