#pragma once

#include "anchorhull/anchor_set.hpp"
#include "anchorhull/generator.hpp"

namespace anchorhull {

/// Self-contained experiment setup: a ground-truth generator that emits the
/// reference signals from its anchors, plus a perturbed copy standing in
/// for the not-yet-personalized starting point.
struct FixtureConfig {
    uint64_t seed = 7;
    GeneratorConfig generator;      // defaults: k=16, L=6, h=32, d=64
    int anchor_count = 8;
    double perturb_magnitude = 0.05;
};

struct Fixture {
    LayeredGenerator truth;
    LayeredGenerator domain;  // truth with seeded weight noise
    AnchorSet anchors;
    std::vector<Signal> references;  // references[i] == truth(anchor i)
};

/// Deterministic in cfg.seed. Anchors are sparse convex combinations of a
/// seeded Gaussian base set, resampled (bounded retries) until the set is
/// well-conditioned.
Fixture make_fixture(const FixtureConfig& cfg);

}  // namespace anchorhull
