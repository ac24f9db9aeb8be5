#include "anchorhull/tuning.hpp"

#include <cmath>

namespace anchorhull {

ReferenceSet::ReferenceSet(AnchorSet a, std::vector<std::pair<int, Signal>> p)
    : anchors(std::move(a)), pairs(std::move(p)) {
    require(!pairs.empty(), "ReferenceSet: need at least one (anchor, signal) pair");
    for (const auto& [idx, sig] : pairs) {
        require(idx >= 0 && idx < anchors.count(),
                "ReferenceSet: anchor index " + std::to_string(idx) + " out of range [0, " +
                    std::to_string(anchors.count()) + ")");
        require(all_finite(sig.values), "ReferenceSet: target signal has non-finite entries");
    }
}

void TuneConfig::validate() const {
    require(steps >= 0, "TuneConfig: steps must be >= 0");
    require(learning_rate > 0.0, "TuneConfig: learning rate must be positive");
    require(lambda_l2 >= 0.0, "TuneConfig: lambda_l2 must be >= 0");
}

double reconstruction_loss(const LayeredGenerator& gen, const LatentCode& w, const Signal& x,
                           const TuneConfig& cfg) {
    const Signal produced = gen.forward(w);
    require(produced.size() == x.size(), "reconstruction_loss: target length " +
                                             std::to_string(x.size()) + " != output length " +
                                             std::to_string(produced.size()));
    double loss = cfg.lambda_l2 * (produced.values - x.values).squaredNorm();
    if (cfg.perceptual) loss += cfg.perceptual->value(produced, x);
    return loss;
}

namespace {

// Mean loss over all pairs plus, when requested, the mean weight gradient.
double batch_loss(const LayeredGenerator& gen, const ReferenceSet& refs, const TuneConfig& cfg,
                  GeneratorGrads* grads_out) {
    const double inv_n = 1.0 / static_cast<double>(refs.pairs.size());
    double total = 0.0;
    bool first = true;
    for (const auto& [idx, target] : refs.pairs) {
        const LatentCode w(refs.anchors.anchor(idx));
        const Signal produced = gen.forward(w);
        const VectorXd residual = produced.values - target.values;
        total += cfg.lambda_l2 * residual.squaredNorm();
        if (cfg.perceptual) total += cfg.perceptual->value(produced, target);

        if (grads_out) {
            VectorXd cot = 2.0 * cfg.lambda_l2 * residual;
            if (cfg.perceptual) cot += cfg.perceptual->grad_produced(produced, target);
            GeneratorGrads g = gen.vjp(w, Signal(std::move(cot)), true);
            if (first) {
                *grads_out = std::move(g);
                grads_out->scale(inv_n);
                first = false;
            } else {
                grads_out->accumulate(g, inv_n);
            }
        }
    }
    return total * inv_n;
}

}  // namespace

TuneResult tune(const LayeredGenerator& gen, const ReferenceSet& refs, const TuneConfig& cfg) {
    cfg.validate();
    TuneResult result{gen, {}};
    result.loss_trace.reserve(static_cast<size_t>(cfg.steps) + 1);

    for (int step = 0; step < cfg.steps; ++step) {
        GeneratorGrads grads;
        const double loss = batch_loss(result.generator, refs, cfg, &grads);
        if (!std::isfinite(loss))
            throw std::runtime_error("tune: non-finite loss at step " + std::to_string(step));
        result.loss_trace.push_back(loss);
        result.generator.axpy_weights(grads, -cfg.learning_rate);
    }

    const double final_loss = batch_loss(result.generator, refs, cfg, nullptr);
    if (!std::isfinite(final_loss))
        throw std::runtime_error("tune: non-finite loss at step " + std::to_string(cfg.steps));
    result.loss_trace.push_back(final_loss);
    return result;
}

}  // namespace anchorhull
