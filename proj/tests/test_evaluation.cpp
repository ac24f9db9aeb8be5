#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "anchorhull/evaluation.hpp"
#include "anchorhull/fixture.hpp"
#include "anchorhull/rng.hpp"

using namespace anchorhull;

namespace {

const Fixture& shared_fixture() {
    static const Fixture fx = make_fixture(FixtureConfig{});
    return fx;
}

Signal sig(std::initializer_list<double> v) {
    VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x[i++] = d;
    return Signal(std::move(x));
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("id_score basics") {
    const std::vector<Signal> refs = {sig({1, 0, 0}), sig({0, 1, 0}), sig({0.5, 0.5, 0})};
    const FeatureExtractor fx = FeatureExtractor::identity();

    CHECK(id_score(refs[1], refs, fx) == doctest::Approx(1.0).epsilon(1e-12));
    // query orthogonal to every reference
    CHECK(id_score(sig({0, 0, 1}), refs, fx) == doctest::Approx(0.0).epsilon(1e-12));

    // excluding the best match lowers or preserves the score
    const Signal q = sig({0.9, 0.1, 0});
    const double full = id_score(q, refs, fx);
    const double without_best = id_score(q, refs, fx, {0});
    CHECK(without_best <= full + 1e-12);

    CHECK_THROWS_AS(id_score(q, refs, fx, {0, 1, 2}), std::invalid_argument);
}

TEST_CASE("id_score is invariant to feature scaling") {
    const Fixture& fix = shared_fixture();
    const FeatureExtractor base = FeatureExtractor::random_projection(7, 16, 64);
    const FeatureExtractor scaled = FeatureExtractor::plugin(
        [base](const Signal& s) { return VectorXd(3.7 * base(s)); });
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        VectorXd q(64);
        for (int i = 0; i < 64; ++i) q[i] = rng.normal();
        const double a = id_score(Signal(q), fix.references, base);
        const double b = id_score(Signal(q), fix.references, scaled);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("diversity_score") {
    const SignalDistance dist = l2_distance();

    SUBCASE("identical signals") {
        const std::vector<Signal> s(4, sig({1, 2, 3}));
        const DiversityScore d = diversity_score(s, dist);
        CHECK(d.mean == 0.0);
        CHECK(d.stddev == 0.0);
        CHECK(d.pair_count == 6);
    }
    SUBCASE("two signals at distance 3") {
        const DiversityScore d = diversity_score({sig({0, 0}), sig({3, 0})}, dist);
        CHECK(d.mean == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(d.stddev == 0.0);
    }
    SUBCASE("permutation invariance") {
        std::vector<Signal> s = {sig({0, 0}), sig({1, 1}), sig({5, 2}), sig({-3, 4})};
        const DiversityScore a = diversity_score(s, dist);
        std::reverse(s.begin(), s.end());
        const DiversityScore b = diversity_score(s, dist);
        CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
        CHECK(a.stddev == doctest::Approx(b.stddev).epsilon(1e-12));
    }
    SUBCASE("clustered mode pools intra-cluster pairs only") {
        // two tight clusters far apart: pooled pairs stay within clusters
        const std::vector<Signal> refs = {sig({0, 0}), sig({100, 0})};
        const std::vector<Signal> s = {sig({0, 0}), sig({1, 0}), sig({100, 0}), sig({103, 0})};
        const DiversityScore d = diversity_score(s, l2_distance(), &refs);
        CHECK(d.pair_count == 2);
        CHECK(d.mean == doctest::Approx(2.0).epsilon(1e-12));  // (1 + 3) / 2
    }
    SUBCASE("empty input is an error") {
        CHECK_THROWS_AS(diversity_score({}, dist), std::invalid_argument);
    }
}

TEST_CASE("interpolation_sweep bookkeeping and fixture ordering") {
    const Fixture& fix = shared_fixture();
    std::vector<std::pair<int, Signal>> pairs;
    for (int i = 0; i < fix.anchors.count(); ++i) pairs.emplace_back(i, fix.references[i]);
    TuneConfig tc;
    tc.steps = 800;
    const TuneResult tuned = tune(fix.domain, ReferenceSet(fix.anchors, pairs), tc);
    const FeatureExtractor fx = FeatureExtractor::random_projection(424242, 32, 64);

    const int num_pairs = 40, steps_per_pair = 5;
    const SweepReport rep = interpolation_sweep(fix.domain, tuned.generator, fix.anchors,
                                                fix.references, num_pairs, steps_per_pair, fx, 777);
    CHECK(rep.rows.size() == static_cast<size_t>(num_pairs * steps_per_pair * 2));

    // after-tuning curve dominates at every grid point
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
        CHECK(rep.summary(t, "id_after").mean >= rep.summary(t, "id_before").mean);

    // the t = 0 record on the tuned generator scores the anchor
    // reconstruction with that anchor excluded
    for (const auto& row : rep.rows) {
        if (row[0] == 1.0 && row[4] == 0.0) {
            const int i = static_cast<int>(row[2]);
            const int j = static_cast<int>(row[3]);
            const Signal recon = tuned.generator.forward(LatentCode(fix.anchors.anchor(i)));
            const double expected = id_score(recon, fix.references, fx,
                                             {i, j});
            CHECK(row[5] == doctest::Approx(expected).epsilon(1e-12));
            break;
        }
    }

    // deterministic under the seed
    const SweepReport again = interpolation_sweep(fix.domain, tuned.generator, fix.anchors,
                                                  fix.references, num_pairs, steps_per_pair, fx, 777);
    CHECK(rep.rows == again.rows);
}

TEST_CASE("neighborhood_sweep decay and determinism") {
    const Fixture& fix = shared_fixture();
    const FeatureExtractor fx = FeatureExtractor::random_projection(424242, 32, 64);
    const std::vector<double> radii = {0.0, 0.5, 1.0, 2.0, 4.0};
    const SweepReport rep = neighborhood_sweep(fix.truth, fix.anchors, radii, 8, fx, 778);

    CHECK(rep.rows.size() == static_cast<size_t>(fix.anchors.count() * 8 * 5));
    CHECK(rep.summary(4.0, "id").mean <= rep.summary(0.0, "id").mean);

    // radius 0 walks sit exactly on the anchor reconstruction
    for (const auto& row : rep.rows) {
        if (row[2] == 0.0) {
            const int a = static_cast<int>(row[0]);
            std::vector<Signal> refs;
            for (int i = 0; i < fix.anchors.count(); ++i)
                refs.push_back(fix.truth.forward(LatentCode(fix.anchors.anchor(i))));
            const double expected =
                id_score(refs[static_cast<size_t>(a)], refs, fx, {a});
            CHECK(row[3] == doctest::Approx(expected).epsilon(1e-12));
            break;
        }
    }

    const SweepReport again = neighborhood_sweep(fix.truth, fix.anchors, radii, 8, fx, 778);
    CHECK(rep.rows == again.rows);

    CHECK_THROWS_AS(neighborhood_sweep(fix.truth, fix.anchors, {0.5, 1.0}, 2, fx, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(neighborhood_sweep(fix.truth, fix.anchors, {0.0, 2.0, 1.0}, 2, fx, 1),
                    std::invalid_argument);
}

TEST_CASE("beta_tradeoff_sweep validates its grid and records both errors") {
    const Fixture& fix = shared_fixture();
    const FeatureExtractor fx = FeatureExtractor::random_projection(424242, 32, 64);
    ProjectionConfig pc;
    pc.steps = 200;

    CHECK_THROWS_AS(beta_tradeoff_sweep(fix.truth, fix.anchors, fix.references, fix.references,
                                        {0.0, 0.02}, pc, fx),
                    std::invalid_argument);

    std::vector<Signal> targets(fix.references.begin(), fix.references.begin() + 3);
    const SweepReport rep = beta_tradeoff_sweep(fix.truth, fix.anchors, targets, fix.references,
                                                {0.0, 0.05, kUnboundedBeta}, pc, fx);
    CHECK(rep.rows.size() == 9);
    for (const auto& row : rep.rows) {
        CHECK(row[2] >= 0.0);             // recon error
        CHECK(row[3] >= -1e-12);          // id error
        CHECK(row[3] <= 2.0 + 1e-12);
    }
    // unbounded axis is retrievable
    const bool unbounded_row_present =
        std::isfinite(rep.summary(kUnboundedBeta, "id_error").mean);
    CHECK(unbounded_row_present);
}

TEST_CASE("subset_ablation determinism, full-set diversity, error ordering") {
    const Fixture& fix = shared_fixture();
    std::vector<Signal> heldout;
    for (int i = 0; i < 5; ++i)
        heldout.push_back(
            fix.truth.forward(to_latent(fix.anchors, sample_convex(fix.anchors, 700 + i).alpha)));
    TuneConfig tc;
    tc.steps = 600;
    ProjectionConfig pc;
    pc.steps = 800;
    pc.beta = 0.0;
    pc.mode = ProjectionMode::Alpha;

    const int n = fix.anchors.count();
    const SweepReport rep = subset_ablation(fix.anchors, fix.references, heldout, fix.domain,
                                            {3, n}, 2, 99, tc, pc);

    // the full-size subset reproduces the full-set diversity
    const DiversityScore full = diversity_score(fix.references, l2_distance());
    CHECK(rep.summary(n, "diversity").mean == doctest::Approx(full.mean).epsilon(1e-12));

    // fewer anchors reconstruct held-out signals worse
    CHECK(rep.summary(3, "recon_error").mean > rep.summary(n, "recon_error").mean);

    const SweepReport again = subset_ablation(fix.anchors, fix.references, heldout, fix.domain,
                                              {3, n}, 2, 99, tc, pc);
    CHECK(rep.rows == again.rows);

    CHECK_THROWS_AS(subset_ablation(fix.anchors, fix.references, heldout, fix.domain, {n + 1}, 1,
                                    99, tc, pc),
                    std::invalid_argument);
}

}  // TEST_SUITE
