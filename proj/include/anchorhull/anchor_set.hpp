#pragma once

#include <limits>
#include <string>
#include <vector>

#include "anchorhull/types.hpp"

namespace anchorhull {

/// Sentinel dilation budget: the softplus clamp is skipped entirely.
constexpr double kUnboundedBeta = std::numeric_limits<double>::infinity();

/// Generalized barycentric coordinates over an anchor set, together with
/// the dilation budget `beta` the code is meant to respect. A code belongs
/// to the beta-dilated hull when its coefficients sum to 1 and every
/// coefficient is >= -beta.
struct AlphaCode {
    VectorXd coeffs;
    double beta = 0.0;

    AlphaCode() = default;
    explicit AlphaCode(VectorXd c, double b = 0.0) : coeffs(std::move(c)), beta(b) {}
};

/// Per-layer variant: a shared base code plus one additive offset per
/// generator layer.
struct AlphaPlusCode {
    AlphaCode base;
    std::vector<VectorXd> offsets;
};

/// The anchor matrix (k x N, one anchor per column) with its cached Gram
/// inverse. Immutable after construction; all operations on it are pure.
///
/// Rank deficiency is detected at construction (Gram condition number above
/// 1e12, or a non-positive eigenvalue). Dependent sets still support the
/// forward map and projection; coordinate recovery and editing refuse to
/// run and suggest pruning instead.
class AnchorSet {
public:
    explicit AnchorSet(MatrixXd anchors, std::vector<std::string> labels = {});

    int latent_dim() const { return static_cast<int>(anchors_.rows()); }
    int count() const { return static_cast<int>(anchors_.cols()); }
    const MatrixXd& matrix() const { return anchors_; }
    VectorXd anchor(int i) const;
    const std::vector<std::string>& labels() const { return labels_; }

    bool independent() const { return independent_; }
    double gram_condition() const { return gram_condition_; }

    // (M^T M)^-1; throws when the columns are dependent.
    const MatrixXd& gram_inverse() const;

private:
    MatrixXd anchors_;
    std::vector<std::string> labels_;
    MatrixXd gram_inverse_;
    double gram_condition_ = std::numeric_limits<double>::infinity();
    bool independent_ = false;
};

/// w = M * alpha. Basis vector e_i reproduces anchor i exactly.
LatentCode to_latent(const AnchorSet& anchors, const AlphaCode& alpha);

/// Least-squares coordinates alpha = (M^T M)^-1 M^T w. The result is NOT
/// normalized; callers inspect the raw sum. Requires independent columns.
AlphaCode from_latent(const AnchorSet& anchors, const LatentCode& w);

/// Minimal budget containing the code: |min({alpha_i} u {0})|.
double dilation_of(const VectorXd& coeffs);
double dilation_of(const AlphaCode& alpha);

/// Shifted softplus lower bound: (1/s) log(1 + e^{s(x+beta)}) - beta,
/// evaluated with the log1p rearrangement so s(x+beta) up to +-1e4 is safe.
/// An unbounded beta skips the clamp and returns the input unchanged.
double softplus_clamp(double raw, double beta, double sharpness);
VectorXd softplus_clamp(const VectorXd& raw, double beta, double sharpness);

/// d/dx of softplus_clamp: the logistic sigmoid of s(x+beta) (1 when
/// beta is unbounded).
double softplus_clamp_slope(double raw, double beta, double sharpness);
VectorXd softplus_clamp_slope(const VectorXd& raw, double beta, double sharpness);

/// alpha / sum(alpha); rejects sums within 1e-12 of zero.
AlphaCode normalize_sum(const AlphaCode& alpha);

struct ConvexSample {
    AlphaCode alpha;
    bool reduced_support = false;  // set when fewer than 3 anchors exist
};

/// Random sparse convex combination: 3 distinct anchors chosen uniformly,
/// weights drawn from [0,1) and renormalized to sum 1. Deterministic in
/// the seed.
ConvexSample sample_convex(const AnchorSet& anchors, uint64_t seed);

/// (1-t) e_i + t e_j for t in [0,1].
AlphaCode interpolate(const AnchorSet& anchors, int i, int j, double t);

/// The uniform code (1/N, ..., 1/N).
AlphaCode center(const AnchorSet& anchors);

}  // namespace anchorhull
