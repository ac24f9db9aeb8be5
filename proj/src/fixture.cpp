#include "anchorhull/fixture.hpp"

#include <optional>

#include "anchorhull/rng.hpp"

namespace anchorhull {

Fixture make_fixture(const FixtureConfig& cfg) {
    require(cfg.anchor_count >= 2, "make_fixture: need at least 2 anchors");
    require(cfg.anchor_count <= cfg.generator.latent_dim,
            "make_fixture: more anchors than latent dimensions would force a dependent set");
    require(cfg.perturb_magnitude >= 0.0, "make_fixture: perturbation must be >= 0");

    GeneratorConfig gen_cfg = cfg.generator;
    gen_cfg.seed = cfg.seed;
    gen_cfg.validate();

    const int k = gen_cfg.latent_dim;
    const int n = cfg.anchor_count;

    // Anchors are sparse convex combinations of a random Gaussian base set,
    // so they live in a correlated region rather than being independent
    // Gaussians. Resample with a salt until the combination matrix is
    // well-conditioned.
    std::optional<AnchorSet> anchors;
    for (uint64_t salt = 0; salt < 100 && !anchors; ++salt) {
        Rng rng(cfg.seed + 1 + salt * 10007ULL);
        MatrixXd base(k, n);
        for (Eigen::Index r = 0; r < base.rows(); ++r)
            for (Eigen::Index c = 0; c < base.cols(); ++c) base(r, c) = rng.normal();
        const AnchorSet base_set(base);

        MatrixXd m(k, n);
        for (int i = 0; i < n; ++i) {
            const ConvexSample sample =
                sample_convex(base_set, cfg.seed + 2 + salt * 10007ULL + static_cast<uint64_t>(i));
            m.col(i) = to_latent(base_set, sample.alpha).vector;
        }
        std::vector<std::string> labels;
        labels.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) labels.push_back("anchor_" + std::to_string(i));
        AnchorSet candidate(std::move(m), std::move(labels));
        if (candidate.independent() && candidate.gram_condition() < 1e8)
            anchors.emplace(std::move(candidate));
    }
    if (!anchors)
        throw std::runtime_error("make_fixture: failed to draw a well-conditioned anchor set");

    Fixture fixture{LayeredGenerator::random(gen_cfg),
                    LayeredGenerator::zero(gen_cfg),
                    std::move(*anchors),
                    {}};
    fixture.domain = fixture.truth.perturb(cfg.perturb_magnitude, cfg.seed + 101);
    fixture.references.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        fixture.references.push_back(fixture.truth.forward(LatentCode(fixture.anchors.anchor(i))));
    return fixture;
}

}  // namespace anchorhull
