#include "anchorhull/projection.hpp"

#include <cmath>

namespace anchorhull {

void ProjectionConfig::validate(int num_layers) const {
    require(steps >= 1, "ProjectionConfig: steps must be >= 1");
    require(learning_rate > 0.0, "ProjectionConfig: learning rate must be positive");
    require(lambda_reg >= 0.0, "ProjectionConfig: lambda_reg must be >= 0");
    require(sharpness > 0.0, "ProjectionConfig: sharpness must be positive");
    require(std::isnan(beta) == false && (beta >= 0.0),
            "ProjectionConfig: beta must be >= 0 or unbounded");
    require(reg_layer_cutoff == -1 || (reg_layer_cutoff >= 0 && reg_layer_cutoff <= num_layers),
            "ProjectionConfig: reg_layer_cutoff outside [0, " + std::to_string(num_layers) + "]");
}

int ProjectionConfig::effective_cutoff(int num_layers) const {
    if (reg_layer_cutoff >= 0) return reg_layer_cutoff;
    return (2 * num_layers + 2) / 3;  // ceil(2L/3)
}

namespace {

struct LayerCodes {
    std::vector<VectorXd> clamped;  // per-layer code actually fed through M
    std::vector<VectorXd> slopes;   // d clamped / d pre-clamp input (empty when base-only)
};

// Per-layer effective codes for the current iterate.
LayerCodes make_codes(const VectorXd& raw_alpha, const std::vector<VectorXd>& deltas, int L,
                      const ProjectionConfig& cfg) {
    LayerCodes out;
    out.clamped.resize(static_cast<size_t>(L));
    const bool plus = cfg.mode == ProjectionMode::AlphaPlus;
    if (plus && cfg.clamp_base_only) {
        const VectorXd base = softplus_clamp(raw_alpha, cfg.beta, cfg.sharpness);
        for (int l = 0; l < L; ++l) out.clamped[static_cast<size_t>(l)] = base + deltas[static_cast<size_t>(l)];
        return out;
    }
    out.slopes.resize(static_cast<size_t>(L));
    for (int l = 0; l < L; ++l) {
        const VectorXd pre = plus ? VectorXd(raw_alpha + deltas[static_cast<size_t>(l)]) : raw_alpha;
        out.clamped[static_cast<size_t>(l)] = softplus_clamp(pre, cfg.beta, cfg.sharpness);
        out.slopes[static_cast<size_t>(l)] = softplus_clamp_slope(pre, cfg.beta, cfg.sharpness);
    }
    return out;
}

LatentCode codes_to_latent(const AnchorSet& anchors, const LayerCodes& codes) {
    std::vector<VectorXd> layers;
    layers.reserve(codes.clamped.size());
    for (const auto& a : codes.clamped) layers.push_back(anchors.matrix() * a);
    return LatentCode(std::move(layers));
}

}  // namespace

namespace {

// Everything in the objective except the offset-norm penalty: that term is
// non-smooth at the origin, so the descent loop handles it with a proximal
// shrink instead of a gradient, while objective() composes the full
// subgradient for callers.
ObjectiveEval smooth_terms(const LayeredGenerator& gen, const AnchorSet& anchors,
                           const VectorXd& raw_alpha, const std::vector<VectorXd>& deltas,
                           const Signal& input, const DegradationOp& op,
                           const ProjectionConfig& cfg) {
    const int L = gen.config().num_layers;
    const int N = anchors.count();
    const bool plus = cfg.mode == ProjectionMode::AlphaPlus;
    require(cfg.mode == ProjectionMode::Alpha || plus,
            "objective: only the alpha-space modes have an alpha-space objective");
    require(raw_alpha.size() == N, "objective: raw alpha length " +
                                       std::to_string(raw_alpha.size()) + " != anchor count " +
                                       std::to_string(N));
    if (plus) {
        require(static_cast<int>(deltas.size()) == L,
                "objective: need one offset per layer, got " + std::to_string(deltas.size()));
        for (const auto& d : deltas)
            require(d.size() == N, "objective: offset length != anchor count");
    } else {
        require(deltas.empty(), "objective: offsets are only used in alpha_plus mode");
    }

    const int cutoff = cfg.effective_cutoff(L);
    const LayerCodes codes = make_codes(raw_alpha, deltas, L, cfg);
    const LatentCode w_plus = codes_to_latent(anchors, codes);

    ObjectiveEval out;
    const Signal produced = gen.forward(w_plus);
    const Signal degraded = apply(op, produced);
    require(degraded.size() == input.size(),
            "objective: degraded output length " + std::to_string(degraded.size()) +
                " != input length " + std::to_string(input.size()));
    const VectorXd residual = degraded.values - input.values;
    out.recon = residual.squaredNorm();

    for (const auto& a : codes.clamped) {
        const double gap = a.sum() - 1.0;
        out.sum_penalty += gap * gap;
    }
    out.sum_penalty /= L;

    if (plus) {
        for (int l = 0; l < cutoff; ++l) out.offset_penalty += deltas[static_cast<size_t>(l)].norm();
    }

    out.loss = out.recon + cfg.lambda_reg * out.offset_penalty + out.sum_penalty;

    // backward pass
    const Signal cotangent = adjoint_apply(op, Signal(2.0 * residual));
    const GeneratorGrads gen_grads = gen.vjp(w_plus, cotangent, false);

    out.grad_alpha = VectorXd::Zero(N);
    if (plus) out.grad_deltas.assign(static_cast<size_t>(L), VectorXd::Zero(N));

    for (int l = 0; l < L; ++l) {
        const auto& a = codes.clamped[static_cast<size_t>(l)];
        VectorXd grad_code = anchors.matrix().transpose() * gen_grads.latents[static_cast<size_t>(l)];
        grad_code.array() += (2.0 / L) * (a.sum() - 1.0);

        if (plus && cfg.clamp_base_only) {
            // code = clamp(raw) + delta_l
            out.grad_alpha +=
                (grad_code.array() * softplus_clamp_slope(raw_alpha, cfg.beta, cfg.sharpness).array())
                    .matrix();
            out.grad_deltas[static_cast<size_t>(l)] += grad_code;
        } else {
            const VectorXd chained =
                (grad_code.array() * codes.slopes[static_cast<size_t>(l)].array()).matrix();
            out.grad_alpha += chained;
            if (plus) out.grad_deltas[static_cast<size_t>(l)] += chained;
        }
    }
    return out;
}

}  // namespace

ObjectiveEval objective(const LayeredGenerator& gen, const AnchorSet& anchors,
                        const VectorXd& raw_alpha, const std::vector<VectorXd>& deltas,
                        const Signal& input, const DegradationOp& op,
                        const ProjectionConfig& cfg) {
    ObjectiveEval out = smooth_terms(gen, anchors, raw_alpha, deltas, input, op, cfg);
    if (cfg.mode == ProjectionMode::AlphaPlus && cfg.lambda_reg > 0.0) {
        const int cutoff = cfg.effective_cutoff(gen.config().num_layers);
        for (int l = 0; l < cutoff; ++l) {
            const double nrm = deltas[static_cast<size_t>(l)].norm();
            if (nrm > 0.0)
                out.grad_deltas[static_cast<size_t>(l)] +=
                    (cfg.lambda_reg / nrm) * deltas[static_cast<size_t>(l)];
            // subgradient 0 at the origin
        }
    }
    return out;
}

WObjectiveEval unconstrained_objective(const LayeredGenerator& gen,
                                       const std::vector<VectorXd>& w_layers,
                                       const Signal& input, const DegradationOp& op) {
    WObjectiveEval out;
    const LatentCode w_plus{std::vector<VectorXd>(w_layers)};
    const Signal produced = gen.forward(w_plus);
    const Signal degraded = apply(op, produced);
    require(degraded.size() == input.size(), "unconstrained_objective: shape mismatch");
    const VectorXd residual = degraded.values - input.values;
    out.loss = residual.squaredNorm();
    const Signal cotangent = adjoint_apply(op, Signal(2.0 * residual));
    out.grad_layers = gen.vjp(w_plus, cotangent, false).latents;
    return out;
}

namespace {

ProjectionResult project_alpha_modes(const LayeredGenerator& gen, const AnchorSet& anchors,
                                     const Signal& input, const DegradationOp& op,
                                     const ProjectionConfig& cfg) {
    const int L = gen.config().num_layers;
    const int N = anchors.count();
    const bool plus = cfg.mode == ProjectionMode::AlphaPlus;
    const bool bounded = std::isfinite(cfg.beta);

    VectorXd raw = VectorXd::Constant(N, 1.0 / N);  // hull center
    std::vector<VectorXd> deltas;
    if (plus) deltas.assign(static_cast<size_t>(L), VectorXd::Zero(N));

    ProjectionResult result;
    result.loss_trace.reserve(static_cast<size_t>(cfg.steps) + 1);

    auto check_feasible = [&](const LayerCodes& codes, int step) {
        if (!bounded || cfg.clamp_base_only) return;
        for (const auto& a : codes.clamped)
            if (a.minCoeff() < -cfg.beta)
                throw std::logic_error("project: clamped coefficient below -beta at step " +
                                       std::to_string(step));
    };

    const int cutoff = cfg.effective_cutoff(L);
    for (int step = 0; step < cfg.steps; ++step) {
        ObjectiveEval eval = smooth_terms(gen, anchors, raw, deltas, input, op, cfg);
        if (!std::isfinite(eval.loss))
            throw std::runtime_error(
                "project: non-finite objective at step " + std::to_string(step) +
                (result.loss_trace.empty()
                     ? std::string()
                     : " (last finite loss " + std::to_string(result.loss_trace.back()) + ")"));
        check_feasible(make_codes(raw, deltas, L, cfg), step);
        result.loss_trace.push_back(eval.loss);

        raw -= cfg.learning_rate * eval.grad_alpha;
        if (plus) {
            // forward-backward step: gradient on the smooth terms, proximal
            // shrink for the offset-norm penalty
            const double shrink = cfg.learning_rate * cfg.lambda_reg;
            for (int l = 0; l < L; ++l) {
                VectorXd v = deltas[static_cast<size_t>(l)] -
                             cfg.learning_rate * eval.grad_deltas[static_cast<size_t>(l)];
                if (l < cutoff && shrink > 0.0) {
                    const double nrm = v.norm();
                    v = nrm <= shrink ? VectorXd::Zero(N).eval()
                                      : VectorXd((1.0 - shrink / nrm) * v);
                }
                deltas[static_cast<size_t>(l)] = std::move(v);
            }
        }
    }

    // final point: codes, output, and trace entry
    const LayerCodes codes = make_codes(raw, deltas, L, cfg);
    check_feasible(codes, cfg.steps);
    result.latent = codes_to_latent(anchors, codes);
    result.output = gen.forward(result.latent);
    {
        const ObjectiveEval final_eval = objective(gen, anchors, raw, deltas, input, op, cfg);
        if (!std::isfinite(final_eval.loss))
            throw std::runtime_error("project: non-finite objective at step " +
                                     std::to_string(cfg.steps));
        result.loss_trace.push_back(final_eval.loss);
    }

    double dil = 0.0;
    for (const auto& a : codes.clamped) dil = std::max(dil, dilation_of(a));
    result.effective_dilation = dil;

    // report the base code normalized to the affine slice; offsets untouched
    const VectorXd base = softplus_clamp(raw, cfg.beta, cfg.sharpness);
    result.alpha_star = normalize_sum(AlphaCode(base, cfg.beta));
    if (plus) result.deltas_star = std::move(deltas);
    return result;
}

ProjectionResult project_w_modes(const LayeredGenerator& gen, const AnchorSet& anchors,
                                 const Signal& input, const DegradationOp& op,
                                 const ProjectionConfig& cfg) {
    const int L = gen.config().num_layers;
    const bool layered = cfg.mode == ProjectionMode::UnconstrainedWPlus;
    const VectorXd w_center = anchors.matrix() * center(anchors).coeffs;

    std::vector<VectorXd> w_layers(static_cast<size_t>(L), w_center);

    ProjectionResult result;
    result.loss_trace.reserve(static_cast<size_t>(cfg.steps) + 1);

    for (int step = 0; step < cfg.steps; ++step) {
        WObjectiveEval eval = unconstrained_objective(gen, w_layers, input, op);
        if (!std::isfinite(eval.loss))
            throw std::runtime_error("project: non-finite objective at step " +
                                     std::to_string(step));
        result.loss_trace.push_back(eval.loss);
        if (layered) {
            for (int l = 0; l < L; ++l)
                w_layers[static_cast<size_t>(l)] -= cfg.learning_rate * eval.grad_layers[static_cast<size_t>(l)];
        } else {
            VectorXd g = VectorXd::Zero(w_center.size());
            for (const auto& gl : eval.grad_layers) g += gl;
            for (auto& w : w_layers) w -= cfg.learning_rate * g;
        }
    }

    result.latent = LatentCode(std::vector<VectorXd>(w_layers));
    result.output = gen.forward(result.latent);
    {
        WObjectiveEval final_eval = unconstrained_objective(gen, w_layers, input, op);
        if (!std::isfinite(final_eval.loss))
            throw std::runtime_error("project: non-finite objective at step " +
                                     std::to_string(cfg.steps));
        result.loss_trace.push_back(final_eval.loss);
    }

    if (anchors.independent()) {
        double dil = 0.0;
        for (const auto& w : w_layers)
            dil = std::max(dil, dilation_of(from_latent(anchors, LatentCode(w))));
        result.effective_dilation = dil;
    } else {
        result.effective_dilation = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

}  // namespace

ProjectionResult project(const LayeredGenerator& gen, const AnchorSet& anchors,
                         const Signal& input, const DegradationOp& op,
                         const ProjectionConfig& cfg) {
    cfg.validate(gen.config().num_layers);
    require(all_finite(input.values), "project: input has non-finite entries");
    if (cfg.mode == ProjectionMode::Alpha || cfg.mode == ProjectionMode::AlphaPlus)
        return project_alpha_modes(gen, anchors, input, op, cfg);
    return project_w_modes(gen, anchors, input, op, cfg);
}

Signal enhance(const LayeredGenerator& gen, const AnchorSet& anchors, const Signal& input,
               const DegradationOp& op, const ProjectionConfig& cfg) {
    const ProjectionResult result = project(gen, anchors, input, op, cfg);
    if (op.kind() != DegradationOp::Kind::Mask) return result.output;

    // keep observed values, fill the rest from the generator output
    const VectorXd& m = op.mask_values();
    VectorXd blended(input.size());
    for (Eigen::Index i = 0; i < input.size(); ++i)
        blended[i] = m[i] == 1.0 ? input.values[i] : result.output.values[i];
    return Signal(std::move(blended));
}

}  // namespace anchorhull
