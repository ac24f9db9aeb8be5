#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "anchorhull/anchor_set.hpp"
#include "anchorhull/generator.hpp"

namespace anchorhull {

/// Optional perceptual term for the reconstruction objective. The default
/// (no plugin) leaves the objective as a pure pixel loss. A plugin must
/// supply its own gradient so descent stays consistent with the reported
/// loss.
class PerceptualLoss {
public:
    virtual ~PerceptualLoss() = default;
    virtual double value(const Signal& produced, const Signal& target) const = 0;
    virtual VectorXd grad_produced(const Signal& produced, const Signal& target) const = 0;
};

/// Anchor-indexed targets: the generator is tuned so anchor i reproduces
/// pairs[i].second.
struct ReferenceSet {
    AnchorSet anchors;
    std::vector<std::pair<int, Signal>> pairs;

    ReferenceSet(AnchorSet a, std::vector<std::pair<int, Signal>> p);
};

struct TuneConfig {
    int steps = 2000;
    double learning_rate = 1e-2;
    double lambda_l2 = 1.0;
    std::shared_ptr<const PerceptualLoss> perceptual;  // null: pixel loss only

    void validate() const;
};

/// perceptual(G(w), x) + lambda_l2 * ||G(w) - x||_2^2
double reconstruction_loss(const LayeredGenerator& gen, const LatentCode& w, const Signal& x,
                           const TuneConfig& cfg);

struct TuneResult {
    LayeredGenerator generator;
    std::vector<double> loss_trace;  // steps+1 entries; [0] is the initial loss
};

/// Full-batch gradient descent on the mean reconstruction loss over all
/// pairs. Deterministic; anchors are never modified; steps = 0 returns the
/// input weights unchanged.
TuneResult tune(const LayeredGenerator& gen, const ReferenceSet& refs, const TuneConfig& cfg);

}  // namespace anchorhull
