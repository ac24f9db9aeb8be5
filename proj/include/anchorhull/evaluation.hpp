#pragma once

#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "anchorhull/anchor_set.hpp"
#include "anchorhull/generator.hpp"
#include "anchorhull/projection.hpp"
#include "anchorhull/tuning.hpp"

namespace anchorhull {

/// Maps a signal to the feature vector used for similarity scoring. The
/// default harness extractor is a seeded Gaussian random projection, which
/// approximately preserves relative similarity without any learned model.
class FeatureExtractor {
public:
    static FeatureExtractor identity();
    static FeatureExtractor random_projection(uint64_t seed, int output_dim, int input_dim);
    static FeatureExtractor plugin(std::function<VectorXd(const Signal&)> fn);

    VectorXd operator()(const Signal& s) const { return fn_(s); }

private:
    explicit FeatureExtractor(std::function<VectorXd(const Signal&)> fn) : fn_(std::move(fn)) {}
    std::function<VectorXd(const Signal&)> fn_;
};

/// Max cosine similarity between the query's features and any non-excluded
/// reference's features. In [-1, 1]; zero-norm features score 0.
double id_score(const Signal& query, const std::vector<Signal>& references,
                const FeatureExtractor& fx, const std::unordered_set<int>& exclude = {});

using SignalDistance = std::function<double(const Signal&, const Signal&)>;
SignalDistance l2_distance();

struct DiversityScore {
    double mean = 0.0;
    double stddev = 0.0;
    int pair_count = 0;
};

/// Mean/std of pairwise distances. With cluster_refs set, each signal is
/// first assigned to its nearest reference and only intra-cluster pairs
/// are pooled.
DiversityScore diversity_score(const std::vector<Signal>& signals, const SignalDistance& dist,
                               const std::vector<Signal>* cluster_refs = nullptr);

/// Raw sweep records plus per-axis-value summary statistics. Every CSV
/// emitted from a report is self-describing (header row mandatory).
struct SweepReport {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    struct Summary {
        double axis = 0.0;
        std::string metric;
        double mean = 0.0;
        double stddev = 0.0;
    };
    std::vector<Summary> summaries;

    const Summary& summary(double axis, const std::string& metric) const;
};

/// Identity preservation along anchor-pair interpolations, evaluated on
/// both generators over the same seeded pairs. `refs` must be
/// anchor-aligned (refs[i] is anchor i's target); the pair's own anchors
/// are excluded from the ranking. Row layout:
/// phase (0 before / 1 after), pair, i, j, t, id.
SweepReport interpolation_sweep(const LayeredGenerator& gen_before,
                                const LayeredGenerator& gen_after, const AnchorSet& anchors,
                                const std::vector<Signal>& refs, int num_pairs,
                                int steps_per_pair, const FeatureExtractor& fx, uint64_t seed);

/// Identity preservation along random straight-line walks out of each
/// anchor. References are the generator's own anchor reconstructions, with
/// the walk's starting anchor excluded. Row layout: anchor, direction,
/// radius, id.
SweepReport neighborhood_sweep(const LayeredGenerator& gen, const AnchorSet& anchors,
                               const std::vector<double>& radius_grid, int directions_per_anchor,
                               const FeatureExtractor& fx, uint64_t seed);

/// Reconstruction error and identity error of identity-op projections over
/// a grid of dilation budgets. Row layout: beta, signal, recon_error,
/// id_error. The grid must contain 0, a positive value, and an unbounded
/// entry.
SweepReport beta_tradeoff_sweep(const LayeredGenerator& gen, const AnchorSet& anchors,
                                const std::vector<Signal>& test_signals,
                                const std::vector<Signal>& reference_signals,
                                const std::vector<double>& beta_grid,
                                const ProjectionConfig& proj_cfg, const FeatureExtractor& fx);

/// For each subset size and repeat: sample an anchor subset, score its
/// diversity, tune a fresh generator on it, and record the mean held-out
/// projection error. Row layout: size, repeat, diversity, recon_error.
SweepReport subset_ablation(const AnchorSet& full_anchors, const std::vector<Signal>& full_refs,
                            const std::vector<Signal>& heldout,
                            const LayeredGenerator& base_generator,
                            const std::vector<int>& sizes, int repeats, uint64_t seed,
                            const TuneConfig& tune_cfg, const ProjectionConfig& proj_cfg);

}  // namespace anchorhull
