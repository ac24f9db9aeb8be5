#include "anchorhull/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "anchorhull/rng.hpp"

namespace anchorhull {

FeatureExtractor FeatureExtractor::identity() {
    return FeatureExtractor([](const Signal& s) { return s.values; });
}

FeatureExtractor FeatureExtractor::random_projection(uint64_t seed, int output_dim,
                                                     int input_dim) {
    require(output_dim >= 1 && input_dim >= 1,
            "FeatureExtractor: projection dimensions must be >= 1");
    Rng rng(seed);
    MatrixXd proj(output_dim, input_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(output_dim));
    for (Eigen::Index r = 0; r < proj.rows(); ++r)
        for (Eigen::Index c = 0; c < proj.cols(); ++c) proj(r, c) = scale * rng.normal();
    return FeatureExtractor([proj = std::move(proj)](const Signal& s) {
        require(s.size() == proj.cols(), "FeatureExtractor: signal length " +
                                             std::to_string(s.size()) + " != expected " +
                                             std::to_string(proj.cols()));
        return VectorXd(proj * s.values);
    });
}

FeatureExtractor FeatureExtractor::plugin(std::function<VectorXd(const Signal&)> fn) {
    require(static_cast<bool>(fn), "FeatureExtractor: empty plugin");
    return FeatureExtractor(std::move(fn));
}

namespace {

double cosine(const VectorXd& a, const VectorXd& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na < 1e-300 || nb < 1e-300) return 0.0;
    return a.dot(b) / (na * nb);
}

}  // namespace

double id_score(const Signal& query, const std::vector<Signal>& references,
                const FeatureExtractor& fx, const std::unordered_set<int>& exclude) {
    require(!references.empty(), "id_score: empty reference set");
    const VectorXd qf = fx(query);
    bool any = false;
    double best = -1.0;
    for (int i = 0; i < static_cast<int>(references.size()); ++i) {
        if (exclude.count(i)) continue;
        any = true;
        best = std::max(best, cosine(qf, fx(references[static_cast<size_t>(i)])));
    }
    if (!any) throw std::invalid_argument("id_score: every reference is excluded");
    return best;
}

SignalDistance l2_distance() {
    return [](const Signal& a, const Signal& b) { return (a.values - b.values).norm(); };
}

DiversityScore diversity_score(const std::vector<Signal>& signals, const SignalDistance& dist,
                               const std::vector<Signal>* cluster_refs) {
    require(!signals.empty(), "diversity_score: empty signal list");

    std::vector<int> cluster(signals.size(), 0);
    if (cluster_refs) {
        require(!cluster_refs->empty(), "diversity_score: empty cluster reference list");
        for (size_t i = 0; i < signals.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < static_cast<int>(cluster_refs->size()); ++r) {
                const double d = dist(signals[i], (*cluster_refs)[static_cast<size_t>(r)]);
                if (d < best) {
                    best = d;
                    cluster[i] = r;
                }
            }
        }
    }

    double sum = 0.0, sum_sq = 0.0;
    int count = 0;
    for (size_t i = 0; i < signals.size(); ++i)
        for (size_t j = i + 1; j < signals.size(); ++j) {
            if (cluster[i] != cluster[j]) continue;
            const double d = dist(signals[i], signals[j]);
            sum += d;
            sum_sq += d * d;
            ++count;
        }

    DiversityScore out;
    out.pair_count = count;
    if (count > 0) {
        out.mean = sum / count;
        const double var = std::max(0.0, sum_sq / count - out.mean * out.mean);
        out.stddev = std::sqrt(var);
    }
    return out;
}

const SweepReport::Summary& SweepReport::summary(double axis, const std::string& metric) const {
    for (const auto& s : summaries)
        if (s.metric == metric && (s.axis == axis || (std::isinf(s.axis) && std::isinf(axis))))
            return s;
    throw std::invalid_argument("SweepReport: no summary for metric '" + metric + "' at axis " +
                                std::to_string(axis));
}

namespace {

struct Accumulator {
    double sum = 0.0, sum_sq = 0.0;
    int n = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double stddev() const {
        if (!n) return 0.0;
        const double m = mean();
        return std::sqrt(std::max(0.0, sum_sq / n - m * m));
    }
};

}  // namespace

SweepReport interpolation_sweep(const LayeredGenerator& gen_before,
                                const LayeredGenerator& gen_after, const AnchorSet& anchors,
                                const std::vector<Signal>& refs, int num_pairs,
                                int steps_per_pair, const FeatureExtractor& fx, uint64_t seed) {
    require(anchors.count() >= 2, "interpolation_sweep: need at least two anchors");
    require(static_cast<int>(refs.size()) == anchors.count(),
            "interpolation_sweep: reference list must be anchor-aligned");
    require(num_pairs >= 1 && steps_per_pair >= 1, "interpolation_sweep: empty grid");

    Rng rng(seed);
    SweepReport report;
    report.columns = {"phase", "pair", "i", "j", "t", "id"};

    std::vector<std::vector<Accumulator>> acc(2, std::vector<Accumulator>(
                                                     static_cast<size_t>(steps_per_pair)));
    std::vector<double> grid(static_cast<size_t>(steps_per_pair));
    for (int q = 0; q < steps_per_pair; ++q)
        grid[static_cast<size_t>(q)] =
            steps_per_pair == 1 ? 0.0 : static_cast<double>(q) / (steps_per_pair - 1);

    for (int p = 0; p < num_pairs; ++p) {
        const std::vector<int> pick = rng.distinct_indices(2, anchors.count());
        const int i = pick[0], j = pick[1];
        for (int q = 0; q < steps_per_pair; ++q) {
            const double t = grid[static_cast<size_t>(q)];
            const LatentCode w = to_latent(anchors, interpolate(anchors, i, j, t));
            const std::unordered_set<int> exclude{i, j};
            for (int phase = 0; phase < 2; ++phase) {
                const LayeredGenerator& gen = phase == 0 ? gen_before : gen_after;
                const double score = id_score(gen.forward(w), refs, fx, exclude);
                report.rows.push_back({static_cast<double>(phase), static_cast<double>(p),
                                       static_cast<double>(i), static_cast<double>(j), t, score});
                acc[static_cast<size_t>(phase)][static_cast<size_t>(q)].add(score);
            }
        }
    }

    for (int phase = 0; phase < 2; ++phase)
        for (int q = 0; q < steps_per_pair; ++q) {
            const auto& a = acc[static_cast<size_t>(phase)][static_cast<size_t>(q)];
            report.summaries.push_back({grid[static_cast<size_t>(q)],
                                        phase == 0 ? "id_before" : "id_after", a.mean(),
                                        a.stddev()});
        }
    return report;
}

SweepReport neighborhood_sweep(const LayeredGenerator& gen, const AnchorSet& anchors,
                               const std::vector<double>& radius_grid, int directions_per_anchor,
                               const FeatureExtractor& fx, uint64_t seed) {
    require(!radius_grid.empty() && radius_grid.front() == 0.0,
            "neighborhood_sweep: radius grid must start at 0");
    require(std::is_sorted(radius_grid.begin(), radius_grid.end()),
            "neighborhood_sweep: radius grid must ascend");
    require(directions_per_anchor >= 1, "neighborhood_sweep: need at least one direction");

    std::vector<Signal> refs;
    refs.reserve(static_cast<size_t>(anchors.count()));
    for (int i = 0; i < anchors.count(); ++i)
        refs.push_back(gen.forward(LatentCode(anchors.anchor(i))));

    Rng rng(seed);
    SweepReport report;
    report.columns = {"anchor", "direction", "radius", "id"};
    std::vector<Accumulator> acc(radius_grid.size());

    const int k = anchors.latent_dim();
    for (int a = 0; a < anchors.count(); ++a) {
        const VectorXd base = anchors.anchor(a);
        const std::unordered_set<int> exclude{a};
        for (int d = 0; d < directions_per_anchor; ++d) {
            VectorXd u(k);
            do {
                for (int c = 0; c < k; ++c) u[c] = rng.normal();
            } while (u.norm() == 0.0);
            u /= u.norm();
            for (size_t r = 0; r < radius_grid.size(); ++r) {
                const LatentCode w(base + radius_grid[r] * u);
                const double score = id_score(gen.forward(w), refs, fx, exclude);
                report.rows.push_back({static_cast<double>(a), static_cast<double>(d),
                                       radius_grid[r], score});
                acc[r].add(score);
            }
        }
    }
    for (size_t r = 0; r < radius_grid.size(); ++r)
        report.summaries.push_back({radius_grid[r], "id", acc[r].mean(), acc[r].stddev()});
    return report;
}

SweepReport beta_tradeoff_sweep(const LayeredGenerator& gen, const AnchorSet& anchors,
                                const std::vector<Signal>& test_signals,
                                const std::vector<Signal>& reference_signals,
                                const std::vector<double>& beta_grid,
                                const ProjectionConfig& proj_cfg, const FeatureExtractor& fx) {
    require(!test_signals.empty(), "beta_tradeoff_sweep: no test signals");
    require(!reference_signals.empty(), "beta_tradeoff_sweep: no reference signals");
    bool has_zero = false, has_positive = false, has_unbounded = false;
    for (double b : beta_grid) {
        if (b == 0.0) has_zero = true;
        if (b > 0.0 && std::isfinite(b)) has_positive = true;
        if (std::isinf(b)) has_unbounded = true;
    }
    require(has_zero && has_positive && has_unbounded,
            "beta_tradeoff_sweep: grid must contain 0, a positive value, and unbounded");

    const DegradationOp op = DegradationOp::identity();
    SweepReport report;
    report.columns = {"beta", "signal", "recon_error", "id_error"};

    for (double beta : beta_grid) {
        ProjectionConfig cfg = proj_cfg;
        cfg.beta = beta;
        Accumulator recon_acc, id_acc;
        for (int s = 0; s < static_cast<int>(test_signals.size()); ++s) {
            const ProjectionResult res =
                project(gen, anchors, test_signals[static_cast<size_t>(s)], op, cfg);
            const double recon =
                (res.output.values - test_signals[static_cast<size_t>(s)].values).norm();
            const double id_err =
                1.0 - id_score(res.output, reference_signals, fx);
            report.rows.push_back({beta, static_cast<double>(s), recon, id_err});
            recon_acc.add(recon);
            id_acc.add(id_err);
        }
        report.summaries.push_back({beta, "recon_error", recon_acc.mean(), recon_acc.stddev()});
        report.summaries.push_back({beta, "id_error", id_acc.mean(), id_acc.stddev()});
    }
    return report;
}

SweepReport subset_ablation(const AnchorSet& full_anchors, const std::vector<Signal>& full_refs,
                            const std::vector<Signal>& heldout,
                            const LayeredGenerator& base_generator,
                            const std::vector<int>& sizes, int repeats, uint64_t seed,
                            const TuneConfig& tune_cfg, const ProjectionConfig& proj_cfg) {
    require(static_cast<int>(full_refs.size()) == full_anchors.count(),
            "subset_ablation: reference list must be anchor-aligned");
    require(!heldout.empty(), "subset_ablation: no held-out signals");
    require(repeats >= 1, "subset_ablation: repeats must be >= 1");
    for (int s : sizes)
        require(s >= 2 && s <= full_anchors.count(),
                "subset_ablation: size " + std::to_string(s) + " outside [2, " +
                    std::to_string(full_anchors.count()) + "]");

    const DegradationOp op = DegradationOp::identity();
    const SignalDistance dist = l2_distance();
    SweepReport report;
    report.columns = {"size", "repeat", "diversity", "recon_error"};

    for (int size : sizes) {
        Accumulator div_acc, err_acc;
        for (int rep = 0; rep < repeats; ++rep) {
            Rng rng(seed * 1000003ULL + static_cast<uint64_t>(size) * 1009ULL +
                    static_cast<uint64_t>(rep));
            const std::vector<int> picked = rng.distinct_indices(size, full_anchors.count());

            MatrixXd sub(full_anchors.latent_dim(), size);
            std::vector<Signal> sub_refs;
            std::vector<std::pair<int, Signal>> pairs;
            for (int c = 0; c < size; ++c) {
                sub.col(c) = full_anchors.anchor(picked[static_cast<size_t>(c)]);
                sub_refs.push_back(full_refs[static_cast<size_t>(picked[static_cast<size_t>(c)])]);
                pairs.emplace_back(c, sub_refs.back());
            }
            const AnchorSet sub_anchors(sub);
            const DiversityScore div = diversity_score(sub_refs, dist);

            const TuneResult tuned = tune(base_generator, ReferenceSet(sub_anchors, pairs), tune_cfg);

            Accumulator per_run;
            for (const Signal& target : heldout) {
                const ProjectionResult res =
                    project(tuned.generator, sub_anchors, target, op, proj_cfg);
                per_run.add((res.output.values - target.values).norm());
            }
            report.rows.push_back({static_cast<double>(size), static_cast<double>(rep), div.mean,
                                   per_run.mean()});
            div_acc.add(div.mean);
            err_acc.add(per_run.mean());
        }
        report.summaries.push_back({static_cast<double>(size), "diversity", div_acc.mean(),
                                    div_acc.stddev()});
        report.summaries.push_back({static_cast<double>(size), "recon_error", err_acc.mean(),
                                    err_acc.stddev()});
    }
    return report;
}

}  // namespace anchorhull
