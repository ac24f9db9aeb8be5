#pragma once

#include <vector>

#include "anchorhull/anchor_set.hpp"
#include "anchorhull/degradation.hpp"
#include "anchorhull/generator.hpp"

namespace anchorhull {

enum class ProjectionMode { Alpha, AlphaPlus, UnconstrainedW, UnconstrainedWPlus };

struct ProjectionConfig {
    double beta = 0.0;  // kUnboundedBeta skips the softplus clamp entirely
    double sharpness = 100.0;
    int steps = 2000;
    double learning_rate = 0.01;
    double lambda_reg = 10.0;
    // Number of leading layers whose offset norm is penalized; -1 means
    // ceil(2L/3).
    int reg_layer_cutoff = -1;
    ProjectionMode mode = ProjectionMode::AlphaPlus;
    // When set, the clamp is applied to the base code only and offsets are
    // added afterwards, so per-layer codes may dip below -beta. The default
    // clamps each per-layer sum, keeping every layer's code in the dilated
    // hull.
    bool clamp_base_only = false;

    void validate(int num_layers) const;
    int effective_cutoff(int num_layers) const;
};

struct ProjectionResult {
    // Normalized base code (alpha modes; empty for the unconstrained modes).
    AlphaCode alpha_star;
    // Final per-layer offsets (alpha_plus mode only).
    std::vector<VectorXd> deltas_star;
    // Per-layer latent the output was generated from.
    LatentCode latent;
    Signal output;
    // Loss at the start of every step plus the final loss (steps+1 entries).
    std::vector<double> loss_trace;
    // Max over layers of dilation_of(per-layer code); for unconstrained
    // modes, measured on least-squares coordinates when anchors are
    // independent, NaN otherwise.
    double effective_dilation = 0.0;
};

struct ObjectiveEval {
    double loss = 0.0;
    double recon = 0.0;           // ||(phi o G)(w+) - input||^2
    double sum_penalty = 0.0;     // per-layer (sum - 1)^2, averaged
    double offset_penalty = 0.0;  // sum of offset norms over regularized layers
    VectorXd grad_alpha;
    std::vector<VectorXd> grad_deltas;
};

/// Value and analytic gradients of the alpha-space objective at
/// (raw_alpha, deltas). `deltas` must be empty in Alpha mode and hold one
/// length-N vector per layer in AlphaPlus mode.
ObjectiveEval objective(const LayeredGenerator& gen, const AnchorSet& anchors,
                        const VectorXd& raw_alpha, const std::vector<VectorXd>& deltas,
                        const Signal& input, const DegradationOp& op,
                        const ProjectionConfig& cfg);

struct WObjectiveEval {
    double loss = 0.0;
    std::vector<VectorXd> grad_layers;
};

/// Plain latent-space data term ||(phi o G)(w+) - input||^2 with its
/// per-layer gradients; used by the unconstrained modes.
WObjectiveEval unconstrained_objective(const LayeredGenerator& gen,
                                       const std::vector<VectorXd>& w_layers,
                                       const Signal& input, const DegradationOp& op);

/// Gradient descent from the hull center. Deterministic given inputs.
ProjectionResult project(const LayeredGenerator& gen, const AnchorSet& anchors,
                         const Signal& input, const DegradationOp& op,
                         const ProjectionConfig& cfg);

/// project() plus output compositing: masked inputs keep their observed
/// values and only missing entries come from the generator.
Signal enhance(const LayeredGenerator& gen, const AnchorSet& anchors, const Signal& input,
               const DegradationOp& op, const ProjectionConfig& cfg);

}  // namespace anchorhull
