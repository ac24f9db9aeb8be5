#include "anchorhull/anchor_set.hpp"

#include <cmath>
#include <sstream>

#include "anchorhull/rng.hpp"

namespace anchorhull {

namespace {
constexpr double kConditionLimit = 1e12;
}

AnchorSet::AnchorSet(MatrixXd anchors, std::vector<std::string> labels)
    : anchors_(std::move(anchors)), labels_(std::move(labels)) {
    require(anchors_.rows() >= 1, "AnchorSet: latent dimension must be >= 1");
    require(anchors_.cols() >= 2, "AnchorSet: need at least 2 anchors, got " +
                                      std::to_string(anchors_.cols()));
    require(all_finite(anchors_), "AnchorSet: anchors contain non-finite entries");
    require(labels_.empty() || static_cast<Eigen::Index>(labels_.size()) == anchors_.cols(),
            "AnchorSet: label count does not match anchor count");

    const MatrixXd gram = anchors_.transpose() * anchors_;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    gram_condition_ = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    independent_ = lo > 0.0 && gram_condition_ <= kConditionLimit;
    if (independent_) {
        Eigen::LLT<MatrixXd> llt(gram);
        independent_ = llt.info() == Eigen::Success;
        if (independent_)
            gram_inverse_ = llt.solve(MatrixXd::Identity(anchors_.cols(), anchors_.cols()));
    }
}

VectorXd AnchorSet::anchor(int i) const {
    require(i >= 0 && i < count(), "AnchorSet: anchor index " + std::to_string(i) +
                                       " out of range [0, " + std::to_string(count()) + ")");
    return anchors_.col(i);
}

const MatrixXd& AnchorSet::gram_inverse() const {
    if (!independent_)
        throw std::runtime_error(
            "AnchorSet: anchor columns are linearly dependent (Gram condition " +
            std::to_string(gram_condition_) +
            "); drop redundant anchors to enable coordinate recovery");
    return gram_inverse_;
}

LatentCode to_latent(const AnchorSet& anchors, const AlphaCode& alpha) {
    if (alpha.coeffs.size() != anchors.count()) {
        std::ostringstream msg;
        msg << "to_latent: coefficient count " << alpha.coeffs.size() << " != anchor count "
            << anchors.count();
        throw std::invalid_argument(msg.str());
    }
    return LatentCode(anchors.matrix() * alpha.coeffs);
}

AlphaCode from_latent(const AnchorSet& anchors, const LatentCode& w) {
    require(w.vector.size() == anchors.latent_dim(),
            "from_latent: latent dimension " + std::to_string(w.vector.size()) +
                " != anchor dimension " + std::to_string(anchors.latent_dim()));
    const MatrixXd& inv = anchors.gram_inverse();  // throws on dependent columns
    return AlphaCode(inv * (anchors.matrix().transpose() * w.vector));
}

double dilation_of(const VectorXd& coeffs) {
    const double lo = coeffs.size() ? coeffs.minCoeff() : 0.0;
    return lo < 0.0 ? -lo : 0.0;
}

double dilation_of(const AlphaCode& alpha) { return dilation_of(alpha.coeffs); }

double softplus_clamp(double raw, double beta, double sharpness) {
    if (!std::isfinite(beta)) return raw;
    const double z = sharpness * (raw + beta);
    const double sp = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return sp / sharpness - beta;
}

VectorXd softplus_clamp(const VectorXd& raw, double beta, double sharpness) {
    if (!std::isfinite(beta)) return raw;
    require(sharpness > 0.0, "softplus_clamp: sharpness must be positive");
    require(beta >= 0.0, "softplus_clamp: beta must be non-negative");
    VectorXd out(raw.size());
    for (Eigen::Index i = 0; i < raw.size(); ++i)
        out[i] = softplus_clamp(raw[i], beta, sharpness);
    return out;
}

double softplus_clamp_slope(double raw, double beta, double sharpness) {
    if (!std::isfinite(beta)) return 1.0;
    const double z = sharpness * (raw + beta);
    if (z > 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

VectorXd softplus_clamp_slope(const VectorXd& raw, double beta, double sharpness) {
    VectorXd out(raw.size());
    for (Eigen::Index i = 0; i < raw.size(); ++i)
        out[i] = softplus_clamp_slope(raw[i], beta, sharpness);
    return out;
}

AlphaCode normalize_sum(const AlphaCode& alpha) {
    const double sum = alpha.coeffs.sum();
    if (std::abs(sum) < 1e-12)
        throw std::runtime_error("normalize_sum: coefficient sum is within 1e-12 of zero");
    return AlphaCode(alpha.coeffs / sum, alpha.beta);
}

ConvexSample sample_convex(const AnchorSet& anchors, uint64_t seed) {
    const int n = anchors.count();
    const int support = std::min(n, 3);

    Rng rng(seed);
    ConvexSample out;
    out.reduced_support = support < 3;

    const std::vector<int> picked = rng.distinct_indices(support, n);
    VectorXd weights(support);
    double sum = 0.0;
    do {
        for (int i = 0; i < support; ++i) weights[i] = rng.uniform();
        sum = weights.sum();
    } while (sum <= 0.0);

    VectorXd coeffs = VectorXd::Zero(n);
    for (int i = 0; i < support; ++i) coeffs[picked[static_cast<size_t>(i)]] = weights[i] / sum;
    out.alpha = AlphaCode(std::move(coeffs));
    return out;
}

AlphaCode interpolate(const AnchorSet& anchors, int i, int j, double t) {
    const int n = anchors.count();
    require(i >= 0 && i < n && j >= 0 && j < n,
            "interpolate: anchor index out of range [0, " + std::to_string(n) + ")");
    require(i != j, "interpolate: endpoints must differ");
    require(t >= 0.0 && t <= 1.0,
            "interpolate: t = " + std::to_string(t) + " outside [0, 1]");
    VectorXd coeffs = VectorXd::Zero(n);
    coeffs[i] = 1.0 - t;
    coeffs[j] = t;
    return AlphaCode(std::move(coeffs));
}

AlphaCode center(const AnchorSet& anchors) {
    const int n = anchors.count();
    return AlphaCode(VectorXd::Constant(n, 1.0 / n));
}

}  // namespace anchorhull
