#include <doctest.h>

#include <cmath>

#include "anchorhull/generator.hpp"
#include "anchorhull/rng.hpp"

using namespace anchorhull;

namespace {

GeneratorConfig small_config(uint64_t seed) {
    GeneratorConfig cfg;
    cfg.latent_dim = 5;
    cfg.num_layers = 3;
    cfg.hidden_dim = 7;
    cfg.output_dim = 9;
    cfg.seed = seed;
    return cfg;
}

VectorXd random_vector(int n, Rng& rng) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

// Random direction with the same shape as the generator's weights.
GeneratorGrads random_weight_direction(const LayeredGenerator& gen, uint64_t seed) {
    Rng rng(seed);
    GeneratorGrads dir;
    dir.has_weights = true;
    dir.latents.assign(static_cast<size_t>(gen.config().num_layers),
                       VectorXd::Zero(gen.config().latent_dim));
    dir.input_const = random_vector(static_cast<int>(gen.input_const.size()), rng);
    for (size_t l = 0; l < gen.layer_weights.size(); ++l) {
        MatrixXd w(gen.layer_weights[l].rows(), gen.layer_weights[l].cols());
        MatrixXd b(gen.style_weights[l].rows(), gen.style_weights[l].cols());
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.normal();
        for (Eigen::Index r = 0; r < b.rows(); ++r)
            for (Eigen::Index c = 0; c < b.cols(); ++c) b(r, c) = rng.normal();
        dir.layer_weights.push_back(std::move(w));
        dir.style_weights.push_back(std::move(b));
        dir.biases.push_back(random_vector(static_cast<int>(gen.biases[l].size()), rng));
    }
    MatrixXd ro(gen.readout.rows(), gen.readout.cols());
    for (Eigen::Index r = 0; r < ro.rows(); ++r)
        for (Eigen::Index c = 0; c < ro.cols(); ++c) ro(r, c) = rng.normal();
    dir.readout = std::move(ro);
    return dir;
}

}  // namespace

TEST_SUITE("generator") {

TEST_CASE("config validation") {
    GeneratorConfig cfg = small_config(0);
    cfg.num_layers = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config(0);
    cfg.hidden_dim = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("zero network maps everything to the zero signal") {
    const LayeredGenerator gen = LayeredGenerator::zero(small_config(0));
    Rng rng(1);
    const Signal out = gen.forward(LatentCode(random_vector(5, rng)));
    CHECK(out.values == VectorXd::Zero(9));
}

TEST_CASE("broadcasting a single code equals passing explicit copies") {
    const LayeredGenerator gen = LayeredGenerator::random(small_config(3));
    Rng rng(2);
    const VectorXd w = random_vector(5, rng);
    const Signal single = gen.forward(LatentCode(w));
    const Signal copies = gen.forward(LatentCode(std::vector<VectorXd>(3, w)));
    CHECK(single.values == copies.values);  // bit-exact
}

TEST_CASE("golden regression: seed-7 default generator on a fixed latent") {
    GeneratorConfig cfg;
    cfg.seed = 7;
    const LayeredGenerator gen = LayeredGenerator::random(cfg);
    Rng rng(1234);
    const VectorXd w = random_vector(cfg.latent_dim, rng);
    const Signal out = gen.forward(LatentCode(w));
    REQUIRE(out.size() == 64);
    static const double golden[64] = {
        0.62402075985191596,   0.34543559386537298,  -0.82288441557755299, 1.1229811873417122,
        -0.27065943270345005,  -0.54157216304312661, 0.10120390534612472,  -0.24935673775696773,
        -0.2556136407868036,   -0.40818926352140794, 0.60775904920019486,  -0.61026346789737274,
        -0.66180424555572048,  0.18155035046266038,  0.84589847937952722,  0.9262884837960047,
        1.0858459971997543,    0.29445019933916566,  -2.0169996316904255,  -0.6696273904769694,
        -0.68010950801732517,  0.20113714193725796,  -0.28254354271178928, -0.10941802421942451,
        -0.20080582292535409,  0.46792688067824173,  0.62627436506402345,  0.48670979835412748,
        -0.54186883203248126,  0.37160147058778736,  0.47319502101496563,  -0.49210946907640479,
        -0.19444492594877796,  0.19317926113308248,  -0.77199941148659379, -1.4908101654378449,
        -1.4870250925533641,   0.43668520556668144,  -0.42489497166603934, -0.32082837086870947,
        -0.36583189393703563,  -0.83435635058983193, 0.010603268001430743, 1.6453786722908161,
        -0.28529448580411793,  -0.46088274868330115, -0.79409716238815786, 0.28125513537787522,
        -0.66161596692084679,  -0.40332631993478313, 0.1882393021693603,   -0.75711436581160618,
        0.31704366491854846,   -0.27848689585670383, -0.36532743468725321, 0.78931657884228423,
        -0.92690461614837949,  0.39589114416626447,  0.32775488997652291,  -0.66499980651966983,
        -0.83855848732212246,  0.059442792298357722, -0.3621049900533736,  0.40814720748571176};
    for (int i = 0; i < 64; ++i) CHECK(out.values[i] == doctest::Approx(golden[i]).epsilon(1e-10));
}

TEST_CASE("vjp: zero cotangent gives zero gradients") {
    const LayeredGenerator gen = LayeredGenerator::random(small_config(4));
    Rng rng(3);
    const GeneratorGrads g = gen.vjp(LatentCode(random_vector(5, rng)), Signal(VectorXd::Zero(9)));
    for (const auto& gl : g.latents) CHECK(gl == VectorXd::Zero(5));
    CHECK(g.readout == MatrixXd::Zero(9, 7));
    CHECK(g.input_const == VectorXd::Zero(7));
}

TEST_CASE("vjp matches the linear-case closed form under identity activation") {
    GeneratorConfig cfg = small_config(5);
    cfg.activation = GeneratorConfig::Activation::Identity;
    const LayeredGenerator gen = LayeredGenerator::random(cfg);
    Rng rng(6);
    const VectorXd w = random_vector(5, rng);
    const VectorXd u = random_vector(9, rng);
    const GeneratorGrads g = gen.vjp(LatentCode(w), Signal(u));

    // d<u, C h_L>/dw_l = B_l^T W_{l+1}^T ... W_L^T C^T u for an identity activation
    for (int l = 0; l < cfg.num_layers; ++l) {
        VectorXd chain = gen.readout.transpose() * u;
        for (int j = cfg.num_layers - 1; j > l; --j)
            chain = gen.layer_weights[static_cast<size_t>(j)].transpose() * chain;
        const VectorXd expected = gen.style_weights[static_cast<size_t>(l)].transpose() * chain;
        CHECK((g.latents[static_cast<size_t>(l)] - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("vjp agrees with central differences on random probes") {
    const LayeredGenerator gen = LayeredGenerator::random(small_config(8));
    const int L = gen.config().num_layers;
    Rng rng(9);
    const double eps = 1e-5;

    for (int probe = 0; probe < 100; ++probe) {
        std::vector<VectorXd> w_layers;
        for (int l = 0; l < L; ++l) w_layers.push_back(random_vector(5, rng));
        const VectorXd cot = random_vector(9, rng);
        const GeneratorGrads g = gen.vjp(LatentCode(w_layers), Signal(cot));

        // latent direction
        std::vector<VectorXd> dir;
        double analytic = 0.0;
        for (int l = 0; l < L; ++l) {
            dir.push_back(random_vector(5, rng));
            analytic += g.latents[static_cast<size_t>(l)].dot(dir.back());
        }
        auto shifted = [&](double t) {
            std::vector<VectorXd> w2 = w_layers;
            for (int l = 0; l < L; ++l) w2[static_cast<size_t>(l)] += t * dir[static_cast<size_t>(l)];
            return cot.dot(gen.forward(LatentCode(w2)).values);
        };
        const double numeric = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
        CHECK(std::abs(analytic - numeric) <= 1e-4 * std::max(1.0, std::abs(numeric)));
    }
}

TEST_CASE("weight gradients agree with central differences along random directions") {
    const LayeredGenerator gen = LayeredGenerator::random(small_config(10));
    Rng rng(11);
    const double eps = 1e-5;

    for (int probe = 0; probe < 100; ++probe) {
        const VectorXd w = random_vector(5, rng);
        const VectorXd cot = random_vector(9, rng);
        const GeneratorGrads g = gen.vjp(LatentCode(w), Signal(cot), true);
        const GeneratorGrads dir =
            random_weight_direction(gen, 4000 + static_cast<uint64_t>(probe));

        const double analytic = g.weight_dot(dir);
        auto value_at = [&](double t) {
            LayeredGenerator shifted = gen;
            shifted.axpy_weights(dir, t);
            return cot.dot(shifted.forward(LatentCode(w)).values);
        };
        const double numeric = (value_at(eps) - value_at(-eps)) / (2.0 * eps);
        CHECK(std::abs(analytic - numeric) <= 1e-4 * std::max(1.0, std::abs(numeric)));
    }
}

TEST_CASE("perturb determinism and magnitude behavior") {
    const LayeredGenerator gen = LayeredGenerator::random(small_config(12));
    Rng rng(13);
    const VectorXd w = random_vector(5, rng);

    const LayeredGenerator same = gen.perturb(0.0, 99);
    CHECK(gen.forward(LatentCode(w)).values == same.forward(LatentCode(w)).values);

    const LayeredGenerator a = gen.perturb(0.1, 99);
    const LayeredGenerator b = gen.perturb(0.1, 99);
    CHECK(a.forward(LatentCode(w)).values == b.forward(LatentCode(w)).values);

    double mean_change = 0.0;
    for (int i = 0; i < 10; ++i) {
        const VectorXd probe = random_vector(5, rng);
        mean_change += (a.forward(LatentCode(probe)).values -
                        gen.forward(LatentCode(probe)).values)
                           .norm();
    }
    CHECK(mean_change / 10.0 > 0.0);
}

TEST_CASE("smoothness: output change scales linearly as the step shrinks") {
    const LayeredGenerator gen = LayeredGenerator::random(small_config(14));
    Rng rng(15);
    const VectorXd w = random_vector(5, rng);
    VectorXd u = random_vector(5, rng);
    u /= u.norm();
    const VectorXd base = gen.forward(LatentCode(w)).values;

    double delta = 1e-3;
    const double r1 = (gen.forward(LatentCode(VectorXd(w + delta * u))).values - base).norm() / delta;
    const double r2 =
        (gen.forward(LatentCode(VectorXd(w + 0.5 * delta * u))).values - base).norm() / (0.5 * delta);
    CHECK(std::abs(r1 - r2) <= 0.05 * std::max(r1, r2));
}

TEST_CASE("shape errors") {
    const LayeredGenerator gen = LayeredGenerator::random(small_config(16));
    CHECK_THROWS_AS(gen.forward(LatentCode(VectorXd::Zero(4))), std::invalid_argument);
    CHECK_THROWS_AS(gen.forward(LatentCode(std::vector<VectorXd>(2, VectorXd::Zero(5)))),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen.vjp(LatentCode(VectorXd::Zero(5)), Signal(VectorXd::Zero(3))),
                    std::invalid_argument);
}

}  // TEST_SUITE
