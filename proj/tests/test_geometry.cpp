#include <doctest.h>

#include <cmath>

#include "anchorhull/anchor_set.hpp"
#include "anchorhull/rng.hpp"

using namespace anchorhull;

namespace {

MatrixXd standard_basis(int k, int n) {
    MatrixXd m = MatrixXd::Zero(k, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

AnchorSet random_anchors(int k, int n, uint64_t seed) {
    Rng rng(seed);
    MatrixXd m(k, n);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.normal();
    return AnchorSet(std::move(m));
}

VectorXd random_sum1(int n, Rng& rng) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.uniform();
    return v / v.sum();
}

}  // namespace

TEST_SUITE("anchor_set") {

TEST_CASE("construction validates shape and content") {
    CHECK_THROWS_AS(AnchorSet(MatrixXd::Zero(3, 1)), std::invalid_argument);
    MatrixXd bad = MatrixXd::Zero(2, 2);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(AnchorSet{bad}, std::invalid_argument);
    CHECK_THROWS_AS(AnchorSet(MatrixXd::Zero(2, 3), {"only-one"}), std::invalid_argument);
}

TEST_CASE("gram inverse multiplies back to identity") {
    const AnchorSet anchors = random_anchors(16, 8, 11);
    REQUIRE(anchors.independent());
    const MatrixXd gram = anchors.matrix().transpose() * anchors.matrix();
    const MatrixXd prod = anchors.gram_inverse() * gram;
    CHECK((prod - MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dependent columns are detected and coordinate recovery refuses") {
    MatrixXd m(3, 3);
    m.col(0) = Eigen::Vector3d(1, 0, 0);
    m.col(1) = Eigen::Vector3d(0, 1, 0);
    m.col(2) = Eigen::Vector3d(1, 1, 0);  // sum of the others
    const AnchorSet anchors(m);
    CHECK_FALSE(anchors.independent());
    CHECK_THROWS_WITH_AS(from_latent(anchors, LatentCode(Eigen::Vector3d(1, 0, 0))),
                         doctest::Contains("drop redundant anchors"), std::runtime_error);
    // forward map stays available
    AlphaCode alpha(VectorXd::Constant(3, 1.0 / 3));
    CHECK(to_latent(anchors, alpha).vector.allFinite());
}

TEST_CASE("to_latent selects anchors, midpoints, centroids") {
    SUBCASE("basis vector selects the anchor") {
        const AnchorSet anchors(standard_basis(2, 2));
        AlphaCode alpha((VectorXd(2) << 1, 0).finished());
        CHECK(to_latent(anchors, alpha).vector == anchors.anchor(0));
    }
    SUBCASE("midpoint") {
        MatrixXd m(2, 2);
        m.col(0) = Eigen::Vector2d(0, 0);
        m.col(1) = Eigen::Vector2d(2, 0);
        const AnchorSet anchors(m);
        AlphaCode alpha((VectorXd(2) << 0.5, 0.5).finished());
        CHECK(to_latent(anchors, alpha).vector == Eigen::Vector2d(1, 0));
    }
    SUBCASE("centroid of the standard basis") {
        const AnchorSet anchors(standard_basis(3, 3));
        AlphaCode alpha(VectorXd::Constant(3, 1.0 / 3));
        CHECK((to_latent(anchors, alpha).vector - Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3))
                  .norm() < 1e-15);
    }
    SUBCASE("dimension mismatch names expected and actual") {
        const AnchorSet anchors(standard_basis(3, 3));
        CHECK_THROWS_WITH_AS(to_latent(anchors, AlphaCode(VectorXd::Zero(2))),
                             doctest::Contains("2 != anchor count 3"), std::invalid_argument);
    }
}

TEST_CASE("from_latent recovers membership and projects") {
    SUBCASE("anchor 0 maps to e0") {
        const AnchorSet anchors = random_anchors(8, 4, 3);
        const AlphaCode alpha = from_latent(anchors, LatentCode(anchors.anchor(0)));
        VectorXd e0 = VectorXd::Zero(4);
        e0[0] = 1.0;
        CHECK((alpha.coeffs - e0).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("orthogonal projection drops the off-span component") {
        const AnchorSet anchors(standard_basis(3, 2));
        const AlphaCode alpha = from_latent(anchors, LatentCode(Eigen::Vector3d(1, 1, 1)));
        CHECK(alpha.coeffs.size() == 2);
        CHECK(alpha.coeffs[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(alpha.coeffs[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("round trip against the forward map") {
        const AnchorSet anchors = random_anchors(16, 6, 17);
        Rng rng(99);
        for (int trial = 0; trial < 50; ++trial) {
            const VectorXd alpha_true = random_sum1(6, rng);
            const LatentCode w = to_latent(anchors, AlphaCode(alpha_true));
            const AlphaCode rec = from_latent(anchors, w);
            CHECK((rec.coeffs - alpha_true).norm() <= 1e-8 * alpha_true.norm());
        }
    }
}

TEST_CASE("dilation_of") {
    CHECK(dilation_of(AlphaCode(VectorXd::Constant(3, 1.0 / 3))) == 0.0);
    CHECK(dilation_of(AlphaCode((VectorXd(3) << 0.6, 0.5, -0.1).finished())) ==
          doctest::Approx(0.1).epsilon(1e-15));
    CHECK(dilation_of(AlphaCode((VectorXd(3) << 1.2, -0.15, -0.05).finished())) ==
          doctest::Approx(0.15).epsilon(1e-15));
}

TEST_CASE("softplus_clamp pinned values") {
    // lower asymptote
    CHECK(softplus_clamp(-10.0, 0.02, 100.0) == doctest::Approx(-0.02).epsilon(1e-9));
    // saturation regime: residual e^{-52}/s
    CHECK(std::abs(softplus_clamp(0.5, 0.02, 100.0) - 0.5) < 1e-12);
    // direct evaluation: ln(1+e^2)/100 - 0.02
    CHECK(softplus_clamp(0.0, 0.02, 100.0) ==
          doctest::Approx(0.0012692801104297252).epsilon(1e-12));
}

TEST_CASE("softplus_clamp stays above -beta and stays stable at huge arguments") {
    Rng rng(5);
    const double beta = 0.02, s = 100.0;
    for (int i = 0; i < 100000; ++i) {
        const double x = (rng.uniform() - 0.5) * 200.0;  // s(x+beta) spans +-1e4
        const double y = softplus_clamp(x, beta, s);
        CHECK(std::isfinite(y));
        CHECK(y >= -beta);
    }
    // monotone in the input
    double prev = softplus_clamp(-5.0, beta, s);
    for (double x = -5.0 + 1e-2; x <= 5.0; x += 1e-2) {
        const double y = softplus_clamp(x, beta, s);
        CHECK(y >= prev);
        prev = y;
    }
}

TEST_CASE("softplus_clamp converges to the hard max as sharpness grows") {
    Rng rng(6);
    for (double s : {10.0, 100.0, 1000.0}) {
        for (int i = 0; i < 200; ++i) {
            const double beta = rng.uniform() * 0.5;
            const double x = (rng.uniform() - 0.5) * 4.0;
            const double soft = softplus_clamp(x, beta, s);
            const double hard = std::max(x, -beta);
            CHECK(std::abs(soft - hard) <= 3.0 / s);
        }
    }
}

TEST_CASE("softplus_clamp unbounded budget is the identity") {
    const VectorXd x = (VectorXd(3) << -4.0, 0.0, 2.5).finished();
    CHECK(softplus_clamp(x, kUnboundedBeta, 100.0) == x);
    CHECK(softplus_clamp_slope(x, kUnboundedBeta, 100.0) == VectorXd::Ones(3));
}

TEST_CASE("normalize_sum") {
    const AlphaCode a = normalize_sum(AlphaCode((VectorXd(2) << 0.5, 0.6).finished()));
    CHECK(a.coeffs[0] == doctest::Approx(5.0 / 11).epsilon(1e-14));
    CHECK(a.coeffs[1] == doctest::Approx(6.0 / 11).epsilon(1e-14));
    CHECK(std::abs(a.coeffs.sum() - 1.0) < 1e-12);

    const AlphaCode id = normalize_sum(AlphaCode((VectorXd(3) << 1, 0, 0).finished()));
    CHECK(id.coeffs == (VectorXd(3) << 1, 0, 0).finished());

    const AlphaCode dilated = normalize_sum(AlphaCode((VectorXd(2) << 2, -1).finished()));
    CHECK(dilated.coeffs == (VectorXd(2) << 2, -1).finished());

    CHECK_THROWS_AS(normalize_sum(AlphaCode((VectorXd(2) << 1, -1).finished())),
                    std::runtime_error);
}

TEST_CASE("sample_convex support, sum, determinism") {
    const AnchorSet anchors = random_anchors(8, 6, 21);
    for (uint64_t seed = 0; seed < 10000; ++seed) {
        const ConvexSample s = sample_convex(anchors, seed);
        CHECK_FALSE(s.reduced_support);
        CHECK(std::abs(s.alpha.coeffs.sum() - 1.0) < 1e-12);
        CHECK(s.alpha.coeffs.minCoeff() >= 0.0);
        CHECK((s.alpha.coeffs.array() != 0.0).count() <= 3);
        CHECK(dilation_of(s.alpha) == 0.0);
    }
    CHECK(sample_convex(anchors, 42).alpha.coeffs == sample_convex(anchors, 42).alpha.coeffs);
    CHECK(sample_convex(anchors, 42).alpha.coeffs != sample_convex(anchors, 43).alpha.coeffs);

    // two anchors: support falls back to 2 and the result flags it
    const AnchorSet two = random_anchors(4, 2, 22);
    const ConvexSample s = sample_convex(two, 1);
    CHECK(s.reduced_support);
    CHECK((s.alpha.coeffs.array() != 0.0).count() <= 2);
    CHECK(std::abs(s.alpha.coeffs.sum() - 1.0) < 1e-12);
}

TEST_CASE("interpolate endpoints, midpoint, domain") {
    const AnchorSet anchors = random_anchors(8, 5, 31);
    CHECK(interpolate(anchors, 1, 3, 0.0).coeffs[1] == 1.0);
    CHECK(interpolate(anchors, 1, 3, 1.0).coeffs[3] == 1.0);
    const AlphaCode mid = interpolate(anchors, 1, 3, 0.5);
    CHECK(mid.coeffs[1] == 0.5);
    CHECK(mid.coeffs[3] == 0.5);
    CHECK(dilation_of(mid) == 0.0);
    CHECK_THROWS_AS(interpolate(anchors, 1, 3, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(interpolate(anchors, 2, 2, 0.5), std::invalid_argument);
}

TEST_CASE("center is the uniform code mapping to the column mean") {
    const AnchorSet anchors = random_anchors(8, 4, 41);
    const AlphaCode c = center(anchors);
    CHECK(c.coeffs == VectorXd::Constant(4, 0.25));
    CHECK(dilation_of(c) == 0.0);
    const VectorXd mean = anchors.matrix().rowwise().mean();
    CHECK((to_latent(anchors, c).vector - mean).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("hull closure under mixing") {
    Rng rng(55);
    const int n = 7;
    for (int trial = 0; trial < 2000; ++trial) {
        const double beta = rng.uniform() * 0.3;
        VectorXd a(n), b(n);
        // random codes with dilation <= beta: shift a simplex point downward
        for (int i = 0; i < n; ++i) a[i] = rng.uniform();
        for (int i = 0; i < n; ++i) b[i] = rng.uniform();
        a = a / a.sum() * (1.0 + n * beta);
        b = b / b.sum() * (1.0 + n * beta);
        a.array() -= beta;
        b.array() -= beta;
        const double t = rng.uniform();
        const VectorXd mix = (1.0 - t) * a + t * b;
        CHECK(dilation_of(mix) <= beta + 1e-12);
    }
}

TEST_CASE("to_latent is linear") {
    const AnchorSet anchors = random_anchors(12, 5, 61);
    Rng rng(62);
    for (int trial = 0; trial < 200; ++trial) {
        VectorXd x(5), y(5);
        for (int i = 0; i < 5; ++i) {
            x[i] = rng.normal();
            y[i] = rng.normal();
        }
        const double a = rng.normal(), b = rng.normal();
        const VectorXd lhs = to_latent(anchors, AlphaCode(a * x + b * y)).vector;
        const VectorXd rhs = a * to_latent(anchors, AlphaCode(x)).vector +
                             b * to_latent(anchors, AlphaCode(y)).vector;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

}  // TEST_SUITE
