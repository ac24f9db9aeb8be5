#pragma once

#include "anchorhull/types.hpp"

namespace anchorhull {

/// Differentiable corruption applied inside the projection objective.
/// All variants are linear maps; `adjoint_apply` is the transpose.
class DegradationOp {
public:
    enum class Kind { Identity, Mask, Downsample };

    static DegradationOp identity();
    static DegradationOp mask(VectorXd m);      // entries must be exactly 0 or 1
    static DegradationOp downsample(int factor);  // f x f area kernel on a square grid

    Kind kind() const { return kind_; }
    const VectorXd& mask_values() const { return mask_; }
    int factor() const { return factor_; }

private:
    DegradationOp(Kind k, VectorXd m, int f) : kind_(k), mask_(std::move(m)), factor_(f) {}
    Kind kind_;
    VectorXd mask_;
    int factor_ = 1;
};

Signal apply(const DegradationOp& op, const Signal& x);

/// Transpose map: <apply(x), y> == <x, adjoint_apply(y)> for all x, y.
Signal adjoint_apply(const DegradationOp& op, const Signal& y);

/// Output length of apply() for an input of length d.
Eigen::Index degraded_size(const DegradationOp& op, Eigen::Index d);

}  // namespace anchorhull
