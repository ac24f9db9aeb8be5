// Batch front end: fixture generation, generator tuning, hull-constrained
// inversion/inpainting/super-resolution, personalized editing, sampling,
// and the analysis sweeps. Every run validates all inputs before writing
// anything and records a manifest with content hashes of its artifacts, so
// `rerun` can reproduce a run byte-for-byte from the manifest alone.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "anchorhull/editing.hpp"
#include "anchorhull/evaluation.hpp"
#include "anchorhull/fixture.hpp"
#include "anchorhull/io.hpp"
#include "anchorhull/projection.hpp"
#include "anchorhull/tuning.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace anchorhull;

namespace {

// ---------------------------------------------------------------- helpers

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  invalid arguments or semantic validation failure\n"
    "  2  usage error (unknown command or flag)\n"
    "  3  numeric or module failure (non-finite loss, non-convergence)\n"
    "  4  file I/O or format error\n";

double parse_beta(const std::string& text) {
    if (text == "unbounded" || text == "inf") return kUnboundedBeta;
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        if (v < 0.0) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("--beta expects a non-negative number or 'unbounded', got '" +
                                    text + "'");
    }
}

json beta_to_json(double beta) {
    if (std::isinf(beta)) return "unbounded";
    return beta;
}

double beta_from_json(const json& j) {
    if (j.is_string()) return parse_beta(j.get<std::string>());
    return j.get<double>();
}

ProjectionMode parse_mode(const std::string& text) {
    if (text == "alpha") return ProjectionMode::Alpha;
    if (text == "alpha-plus") return ProjectionMode::AlphaPlus;
    if (text == "w") return ProjectionMode::UnconstrainedW;
    if (text == "w-plus") return ProjectionMode::UnconstrainedWPlus;
    throw std::invalid_argument("--mode expects alpha|alpha-plus|w|w-plus, got '" + text + "'");
}

std::vector<double> parse_double_list(const std::string& text, bool allow_unbounded) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(allow_unbounded ? parse_beta(tok) : std::stod(tok));
    if (out.empty())
        throw std::invalid_argument("expected a comma-separated list, got '" + text + "'");
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    if (out.empty())
        throw std::invalid_argument("expected a comma-separated list, got '" + text + "'");
    return out;
}

// Collects artifact paths as they are written, then seals the manifest.
class RunDir {
public:
    explicit RunDir(fs::path out) : out_(std::move(out)) {}

    fs::path file(const std::string& rel) {
        fs::create_directories(out_);
        written_.push_back(rel);
        return out_ / rel;
    }

    const fs::path& path() const { return out_; }

    void seal(const std::string& command, json params) {
        io::Manifest manifest;
        manifest.command = command;
        manifest.params = std::move(params);
        for (const std::string& rel : written_)
            manifest.artifacts[rel] = io::sha256_file(out_ / rel);
        fs::create_directories(out_);
        io::write_manifest(out_ / "manifest.json", manifest);
    }

private:
    fs::path out_;
    std::vector<std::string> written_;
};

std::string fmt(double v) { return io::format_double(v); }

// ------------------------------------------------------------- fixture

struct FixtureParams {
    uint64_t seed = 7;
    int latent_dim = 16, layers = 6, hidden = 32, signal_dim = 64;
    int count = 8;
    double perturb = 0.05;

    json to_json() const {
        return {{"seed", seed},     {"latent_dim", latent_dim}, {"layers", layers},
                {"hidden", hidden}, {"signal_dim", signal_dim}, {"count", count},
                {"perturb", perturb}};
    }
    static FixtureParams from_json(const json& j) {
        FixtureParams p;
        p.seed = j.at("seed").get<uint64_t>();
        p.latent_dim = j.at("latent_dim").get<int>();
        p.layers = j.at("layers").get<int>();
        p.hidden = j.at("hidden").get<int>();
        p.signal_dim = j.at("signal_dim").get<int>();
        p.count = j.at("count").get<int>();
        p.perturb = j.at("perturb").get<double>();
        return p;
    }
};

void run_fixture(const FixtureParams& p, RunDir& run) {
    FixtureConfig cfg;
    cfg.seed = p.seed;
    cfg.generator.latent_dim = p.latent_dim;
    cfg.generator.num_layers = p.layers;
    cfg.generator.hidden_dim = p.hidden;
    cfg.generator.output_dim = p.signal_dim;
    cfg.anchor_count = p.count;
    cfg.perturb_magnitude = p.perturb;

    const Fixture fx = make_fixture(cfg);
    io::write_weights(run.file("generator_true.bin"), fx.truth);
    io::write_weights(run.file("generator_domain.bin"), fx.domain);
    io::write_anchors(run.file("anchors.txt"), fx.anchors);
    io::write_signals(run.file("references.txt"), fx.references);
    run.seal("fixture", p.to_json());
}

// ---------------------------------------------------------------- tune

struct TuneParams {
    std::string anchors, weights, refs;
    int steps = 2000;
    double lr = 1e-2, lambda_l2 = 1.0;

    json to_json() const {
        return {{"anchors", anchors}, {"weights", weights}, {"refs", refs},
                {"steps", steps},     {"lr", lr},           {"lambda_l2", lambda_l2}};
    }
    static TuneParams from_json(const json& j) {
        TuneParams p;
        p.anchors = j.at("anchors").get<std::string>();
        p.weights = j.at("weights").get<std::string>();
        p.refs = j.at("refs").get<std::string>();
        p.steps = j.at("steps").get<int>();
        p.lr = j.at("lr").get<double>();
        p.lambda_l2 = j.at("lambda_l2").get<double>();
        return p;
    }
};

void run_tune(const TuneParams& p, RunDir& run) {
    const AnchorSet anchors = io::read_anchors(p.anchors);
    const LayeredGenerator gen = io::read_weights(p.weights);
    const std::vector<Signal> ref_signals = io::read_signals(p.refs);
    require(static_cast<int>(ref_signals.size()) == anchors.count(),
            "tune: reference count " + std::to_string(ref_signals.size()) + " != anchor count " +
                std::to_string(anchors.count()));

    std::vector<std::pair<int, Signal>> pairs;
    for (int i = 0; i < anchors.count(); ++i)
        pairs.emplace_back(i, ref_signals[static_cast<size_t>(i)]);
    TuneConfig cfg;
    cfg.steps = p.steps;
    cfg.learning_rate = p.lr;
    cfg.lambda_l2 = p.lambda_l2;
    cfg.validate();

    const TuneResult result = tune(gen, ReferenceSet(anchors, pairs), cfg);
    io::write_weights(run.file("generator_tuned.bin"), result.generator);
    io::write_trace_csv(run.file("loss_trace.csv"), result.loss_trace);
    run.seal("tune", p.to_json());
}

// ----------------------------------------------------- invert / enhance

struct ProjectParams {
    std::string anchors, weights, input;
    std::string mask;  // inpaint only
    int factor = 2;    // superres only
    double beta = 0.02;
    std::string mode = "alpha-plus";
    int steps = 2000;
    double lr = 0.01, sharpness = 100.0, lambda_reg = 10.0;
    int reg_cutoff = -1;
    bool clamp_base_only = false;

    json to_json() const {
        return {{"anchors", anchors},
                {"weights", weights},
                {"input", input},
                {"mask", mask},
                {"factor", factor},
                {"beta", beta_to_json(beta)},
                {"mode", mode},
                {"steps", steps},
                {"lr", lr},
                {"sharpness", sharpness},
                {"lambda_reg", lambda_reg},
                {"reg_cutoff", reg_cutoff},
                {"clamp_base_only", clamp_base_only}};
    }
    static ProjectParams from_json(const json& j) {
        ProjectParams p;
        p.anchors = j.at("anchors").get<std::string>();
        p.weights = j.at("weights").get<std::string>();
        p.input = j.at("input").get<std::string>();
        p.mask = j.at("mask").get<std::string>();
        p.factor = j.at("factor").get<int>();
        p.beta = beta_from_json(j.at("beta"));
        p.mode = j.at("mode").get<std::string>();
        p.steps = j.at("steps").get<int>();
        p.lr = j.at("lr").get<double>();
        p.sharpness = j.at("sharpness").get<double>();
        p.lambda_reg = j.at("lambda_reg").get<double>();
        p.reg_cutoff = j.at("reg_cutoff").get<int>();
        p.clamp_base_only = j.at("clamp_base_only").get<bool>();
        return p;
    }

    ProjectionConfig config(int num_layers) const {
        ProjectionConfig cfg;
        cfg.beta = beta;
        cfg.mode = parse_mode(mode);
        cfg.steps = steps;
        cfg.learning_rate = lr;
        cfg.sharpness = sharpness;
        cfg.lambda_reg = lambda_reg;
        cfg.reg_layer_cutoff = reg_cutoff;
        cfg.clamp_base_only = clamp_base_only;
        cfg.validate(num_layers);
        return cfg;
    }
};

void write_projection_artifacts(RunDir& run, const ProjectionResult& result) {
    if (result.alpha_star.coeffs.size() > 0)
        io::write_alpha(run.file("alpha.txt"), result.alpha_star);
    io::write_latent(run.file("latent.txt"), result.latent);
    io::write_signal(run.file("output.txt"), result.output);
    io::write_trace_csv(run.file("loss_trace.csv"), result.loss_trace);

    std::ofstream summary(run.file("projection.txt"));
    summary << "final_loss = " << fmt(result.loss_trace.back()) << '\n'
            << "effective_dilation = " << fmt(result.effective_dilation) << '\n';
}

void run_invert(const ProjectParams& p, RunDir& run) {
    const AnchorSet anchors = io::read_anchors(p.anchors);
    const LayeredGenerator gen = io::read_weights(p.weights);
    const Signal input = io::read_signal(p.input);
    const ProjectionConfig cfg = p.config(gen.config().num_layers);
    require(input.size() == gen.config().output_dim,
            "invert: input length " + std::to_string(input.size()) +
                " != generator output length " + std::to_string(gen.config().output_dim));

    const ProjectionResult result = project(gen, anchors, input, DegradationOp::identity(), cfg);
    write_projection_artifacts(run, result);
    run.seal("invert", p.to_json());
}

void run_inpaint(const ProjectParams& p, RunDir& run) {
    const AnchorSet anchors = io::read_anchors(p.anchors);
    const LayeredGenerator gen = io::read_weights(p.weights);
    const Signal input = io::read_signal(p.input);
    const VectorXd mask_bits = io::read_mask(p.mask);
    const ProjectionConfig cfg = p.config(gen.config().num_layers);
    require(mask_bits.size() == gen.config().output_dim,
            "inpaint: mask length " + std::to_string(mask_bits.size()) +
                " != generator output length " + std::to_string(gen.config().output_dim));
    require(input.size() == mask_bits.size(), "inpaint: input length != mask length");

    const DegradationOp op = DegradationOp::mask(mask_bits);
    const ProjectionResult result = project(gen, anchors, input, op, cfg);
    write_projection_artifacts(run, result);

    const VectorXd& m = op.mask_values();
    VectorXd blended(input.size());
    for (Eigen::Index i = 0; i < input.size(); ++i)
        blended[i] = m[i] == 1.0 ? input.values[i] : result.output.values[i];
    io::write_signal(run.file("enhanced.txt"), Signal(std::move(blended)));
    run.seal("inpaint", p.to_json());
}

void run_superres(const ProjectParams& p, RunDir& run) {
    const AnchorSet anchors = io::read_anchors(p.anchors);
    const LayeredGenerator gen = io::read_weights(p.weights);
    const Signal input = io::read_signal(p.input);
    const ProjectionConfig cfg = p.config(gen.config().num_layers);
    const DegradationOp op = DegradationOp::downsample(p.factor);
    const Eigen::Index low_size = degraded_size(op, gen.config().output_dim);
    require(input.size() == low_size,
            "superres: input length " + std::to_string(input.size()) + " != downsampled length " +
                std::to_string(low_size));

    const ProjectionResult result = project(gen, anchors, input, op, cfg);
    write_projection_artifacts(run, result);
    io::write_signal(run.file("enhanced.txt"), result.output);
    run.seal("superres", p.to_json());
}

// ---------------------------------------------------------------- edit

struct EditParams {
    std::string anchors, alpha, direction;
    std::string weights;  // optional: also emit the edited signal
    double theta = 1.0;
    double beta = 0.02;
    std::string policy = "stop";
    bool deflate_direction = false;

    json to_json() const {
        return {{"anchors", anchors},     {"alpha", alpha},
                {"direction", direction}, {"weights", weights},
                {"theta", theta},         {"beta", beta_to_json(beta)},
                {"policy", policy},       {"deflate", deflate_direction}};
    }
    static EditParams from_json(const json& j) {
        EditParams p;
        p.anchors = j.at("anchors").get<std::string>();
        p.alpha = j.at("alpha").get<std::string>();
        p.direction = j.at("direction").get<std::string>();
        p.weights = j.at("weights").get<std::string>();
        p.theta = j.at("theta").get<double>();
        p.beta = beta_from_json(j.at("beta"));
        p.policy = j.at("policy").get<std::string>();
        p.deflate_direction = j.at("deflate").get<bool>();
        return p;
    }
};

void run_edit(const EditParams& p, RunDir& run) {
    const AnchorSet anchors = io::read_anchors(p.anchors);
    const AlphaCode alpha_w = io::read_alpha(p.alpha);
    const VectorXd n = io::read_direction(p.direction);
    std::optional<LayeredGenerator> gen;
    if (!p.weights.empty()) gen.emplace(io::read_weights(p.weights));
    require(std::isfinite(p.beta), "edit: beta must be finite");
    require(std::abs(alpha_w.coeffs.sum() - 1.0) < 1e-6,
            "edit: starting code must be normalized (sum 1), got sum " +
                fmt(alpha_w.coeffs.sum()));
    EditPolicy policy;
    if (p.policy == "stop")
        policy = EditPolicy::Stop;
    else if (p.policy == "project")
        policy = EditPolicy::ProjectBack;
    else
        throw std::invalid_argument("--policy expects stop|project, got '" + p.policy + "'");

    EditDirection dir = project_direction(anchors, n);
    if (p.deflate_direction) dir = deflate(anchors, dir);
    const EditBudget budget = edit_budget(alpha_w, dir, p.beta);
    const AlphaCode edited = edit_with_policy(anchors, alpha_w, dir, p.theta, p.beta, policy);

    io::write_alpha(run.file("alpha_edit.txt"), edited);
    io::write_latent(run.file("latent_edit.txt"), to_latent(anchors, edited));
    {
        std::ofstream out(run.file("budget.txt"));
        out << "theta_max = " << (budget.unbounded ? "unbounded" : fmt(budget.theta_max)) << '\n'
            << "theta_requested = " << fmt(p.theta) << '\n'
            << "dilation = " << fmt(dilation_of(edited)) << '\n';
    }
    if (gen) io::write_signal(run.file("output.txt"), gen->forward(to_latent(anchors, edited)));
    run.seal("edit", p.to_json());
}

// -------------------------------------------------------------- sample

struct SampleParams {
    std::string anchors;
    std::string weights;  // optional: also emit signals
    int count = 1;
    uint64_t seed = 0;

    json to_json() const {
        return {{"anchors", anchors}, {"weights", weights}, {"count", count}, {"seed", seed}};
    }
    static SampleParams from_json(const json& j) {
        SampleParams p;
        p.anchors = j.at("anchors").get<std::string>();
        p.weights = j.at("weights").get<std::string>();
        p.count = j.at("count").get<int>();
        p.seed = j.at("seed").get<uint64_t>();
        return p;
    }
};

void run_sample(const SampleParams& p, RunDir& run) {
    const AnchorSet anchors = io::read_anchors(p.anchors);
    std::optional<LayeredGenerator> gen;
    if (!p.weights.empty()) gen.emplace(io::read_weights(p.weights));
    require(p.count >= 1, "sample: count must be >= 1");

    char name[64];
    for (int i = 0; i < p.count; ++i) {
        const ConvexSample sample = sample_convex(anchors, p.seed + static_cast<uint64_t>(i));
        std::snprintf(name, sizeof(name), "alpha_%03d.txt", i);
        io::write_alpha(run.file(name), sample.alpha);
        if (gen) {
            std::snprintf(name, sizeof(name), "signal_%03d.txt", i);
            io::write_signal(run.file(name), gen->forward(to_latent(anchors, sample.alpha)));
        }
        if (sample.reduced_support)
            std::cerr << "sample: fewer than 3 anchors, support reduced to " << anchors.count()
                      << '\n';
    }
    run.seal("sample", p.to_json());
}

// -------------------------------------------------------------- sweeps

struct SweepInterpParams {
    std::string anchors, weights_before, weights_after, refs;
    int pairs = 100, steps_per_pair = 5;
    uint64_t seed = 0;
    int feature_dim = 32;
    uint64_t feature_seed = 424242;

    json to_json() const {
        return {{"anchors", anchors},
                {"weights_before", weights_before},
                {"weights_after", weights_after},
                {"refs", refs},
                {"pairs", pairs},
                {"steps_per_pair", steps_per_pair},
                {"seed", seed},
                {"feature_dim", feature_dim},
                {"feature_seed", feature_seed}};
    }
    static SweepInterpParams from_json(const json& j) {
        SweepInterpParams p;
        p.anchors = j.at("anchors").get<std::string>();
        p.weights_before = j.at("weights_before").get<std::string>();
        p.weights_after = j.at("weights_after").get<std::string>();
        p.refs = j.at("refs").get<std::string>();
        p.pairs = j.at("pairs").get<int>();
        p.steps_per_pair = j.at("steps_per_pair").get<int>();
        p.seed = j.at("seed").get<uint64_t>();
        p.feature_dim = j.at("feature_dim").get<int>();
        p.feature_seed = j.at("feature_seed").get<uint64_t>();
        return p;
    }
};

void run_sweep_interp(const SweepInterpParams& p, RunDir& run) {
    const AnchorSet anchors = io::read_anchors(p.anchors);
    const LayeredGenerator before = io::read_weights(p.weights_before);
    const LayeredGenerator after = io::read_weights(p.weights_after);
    const std::vector<Signal> refs = io::read_signals(p.refs);
    const FeatureExtractor fx = FeatureExtractor::random_projection(p.feature_seed, p.feature_dim,
                                                                    before.config().output_dim);

    const SweepReport report =
        interpolation_sweep(before, after, anchors, refs, p.pairs, p.steps_per_pair, fx, p.seed);
    io::write_report_csv(run.file("report.csv"), report);
    io::write_report_summary(run.file("summary.txt"), report);
    run.seal("sweep-interp", p.to_json());
}

struct SweepNeighborhoodParams {
    std::string anchors, weights;
    std::string radii = "0,0.5,1,2,4";
    int directions = 8;
    uint64_t seed = 0;
    int feature_dim = 32;
    uint64_t feature_seed = 424242;

    json to_json() const {
        return {{"anchors", anchors}, {"weights", weights},
                {"radii", radii},     {"directions", directions},
                {"seed", seed},       {"feature_dim", feature_dim},
                {"feature_seed", feature_seed}};
    }
    static SweepNeighborhoodParams from_json(const json& j) {
        SweepNeighborhoodParams p;
        p.anchors = j.at("anchors").get<std::string>();
        p.weights = j.at("weights").get<std::string>();
        p.radii = j.at("radii").get<std::string>();
        p.directions = j.at("directions").get<int>();
        p.seed = j.at("seed").get<uint64_t>();
        p.feature_dim = j.at("feature_dim").get<int>();
        p.feature_seed = j.at("feature_seed").get<uint64_t>();
        return p;
    }
};

void run_sweep_neighborhood(const SweepNeighborhoodParams& p, RunDir& run) {
    const AnchorSet anchors = io::read_anchors(p.anchors);
    const LayeredGenerator gen = io::read_weights(p.weights);
    const std::vector<double> radii = parse_double_list(p.radii, false);
    const FeatureExtractor fx =
        FeatureExtractor::random_projection(p.feature_seed, p.feature_dim, gen.config().output_dim);

    const SweepReport report = neighborhood_sweep(gen, anchors, radii, p.directions, fx, p.seed);
    io::write_report_csv(run.file("report.csv"), report);
    io::write_report_summary(run.file("summary.txt"), report);
    run.seal("sweep-neighborhood", p.to_json());
}

struct SweepBetaParams {
    std::string anchors, weights, inputs, refs;
    std::string betas = "0,0.02,0.05,1,unbounded";
    std::string mode = "alpha-plus";
    int steps = 2000;
    double lr = 0.01, sharpness = 100.0, lambda_reg = 10.0;
    int feature_dim = 32;
    uint64_t feature_seed = 424242;

    json to_json() const {
        return {{"anchors", anchors},       {"weights", weights},
                {"inputs", inputs},         {"refs", refs},
                {"betas", betas},           {"mode", mode},
                {"steps", steps},           {"lr", lr},
                {"sharpness", sharpness},   {"lambda_reg", lambda_reg},
                {"feature_dim", feature_dim}, {"feature_seed", feature_seed}};
    }
    static SweepBetaParams from_json(const json& j) {
        SweepBetaParams p;
        p.anchors = j.at("anchors").get<std::string>();
        p.weights = j.at("weights").get<std::string>();
        p.inputs = j.at("inputs").get<std::string>();
        p.refs = j.at("refs").get<std::string>();
        p.betas = j.at("betas").get<std::string>();
        p.mode = j.at("mode").get<std::string>();
        p.steps = j.at("steps").get<int>();
        p.lr = j.at("lr").get<double>();
        p.sharpness = j.at("sharpness").get<double>();
        p.lambda_reg = j.at("lambda_reg").get<double>();
        p.feature_dim = j.at("feature_dim").get<int>();
        p.feature_seed = j.at("feature_seed").get<uint64_t>();
        return p;
    }
};

void run_sweep_beta(const SweepBetaParams& p, RunDir& run) {
    const AnchorSet anchors = io::read_anchors(p.anchors);
    const LayeredGenerator gen = io::read_weights(p.weights);
    const std::vector<Signal> inputs = io::read_signals(p.inputs);
    const std::vector<Signal> refs = io::read_signals(p.refs);
    const std::vector<double> betas = parse_double_list(p.betas, true);
    const FeatureExtractor fx =
        FeatureExtractor::random_projection(p.feature_seed, p.feature_dim, gen.config().output_dim);

    ProjectionConfig cfg;
    cfg.mode = parse_mode(p.mode);
    cfg.steps = p.steps;
    cfg.learning_rate = p.lr;
    cfg.sharpness = p.sharpness;
    cfg.lambda_reg = p.lambda_reg;
    cfg.validate(gen.config().num_layers);

    const SweepReport report = beta_tradeoff_sweep(gen, anchors, inputs, refs, betas, cfg, fx);
    io::write_report_csv(run.file("report.csv"), report);
    io::write_report_summary(run.file("summary.txt"), report);
    run.seal("sweep-beta", p.to_json());
}

struct SweepSubsetParams {
    std::string anchors, weights, refs, heldout;
    std::string sizes = "3,5,8";
    int repeats = 3;
    uint64_t seed = 0;
    int tune_steps = 600;
    double tune_lr = 1e-2;
    int steps = 800;
    double lr = 0.01;
    double beta = 0.0;
    std::string mode = "alpha";

    json to_json() const {
        return {{"anchors", anchors},       {"weights", weights},
                {"refs", refs},             {"heldout", heldout},
                {"sizes", sizes},           {"repeats", repeats},
                {"seed", seed},             {"tune_steps", tune_steps},
                {"tune_lr", tune_lr},       {"steps", steps},
                {"lr", lr},                 {"beta", beta_to_json(beta)},
                {"mode", mode}};
    }
    static SweepSubsetParams from_json(const json& j) {
        SweepSubsetParams p;
        p.anchors = j.at("anchors").get<std::string>();
        p.weights = j.at("weights").get<std::string>();
        p.refs = j.at("refs").get<std::string>();
        p.heldout = j.at("heldout").get<std::string>();
        p.sizes = j.at("sizes").get<std::string>();
        p.repeats = j.at("repeats").get<int>();
        p.seed = j.at("seed").get<uint64_t>();
        p.tune_steps = j.at("tune_steps").get<int>();
        p.tune_lr = j.at("tune_lr").get<double>();
        p.steps = j.at("steps").get<int>();
        p.lr = j.at("lr").get<double>();
        p.beta = beta_from_json(j.at("beta"));
        p.mode = j.at("mode").get<std::string>();
        return p;
    }
};

void run_sweep_subset(const SweepSubsetParams& p, RunDir& run) {
    const AnchorSet anchors = io::read_anchors(p.anchors);
    const LayeredGenerator gen = io::read_weights(p.weights);
    const std::vector<Signal> refs = io::read_signals(p.refs);
    const std::vector<Signal> heldout = io::read_signals(p.heldout);

    TuneConfig tune_cfg;
    tune_cfg.steps = p.tune_steps;
    tune_cfg.learning_rate = p.tune_lr;
    tune_cfg.validate();
    ProjectionConfig proj_cfg;
    proj_cfg.mode = parse_mode(p.mode);
    proj_cfg.steps = p.steps;
    proj_cfg.learning_rate = p.lr;
    proj_cfg.beta = p.beta;
    proj_cfg.validate(gen.config().num_layers);

    const SweepReport report = subset_ablation(anchors, refs, heldout, gen, parse_int_list(p.sizes),
                                               p.repeats, p.seed, tune_cfg, proj_cfg);
    io::write_report_csv(run.file("report.csv"), report);
    io::write_report_summary(run.file("summary.txt"), report);
    run.seal("sweep-subset", p.to_json());
}

// --------------------------------------------------------------- rerun

void dispatch(const std::string& command, const json& params, RunDir& run) {
    if (command == "fixture")
        run_fixture(FixtureParams::from_json(params), run);
    else if (command == "tune")
        run_tune(TuneParams::from_json(params), run);
    else if (command == "invert")
        run_invert(ProjectParams::from_json(params), run);
    else if (command == "inpaint")
        run_inpaint(ProjectParams::from_json(params), run);
    else if (command == "superres")
        run_superres(ProjectParams::from_json(params), run);
    else if (command == "edit")
        run_edit(EditParams::from_json(params), run);
    else if (command == "sample")
        run_sample(SampleParams::from_json(params), run);
    else if (command == "sweep-interp")
        run_sweep_interp(SweepInterpParams::from_json(params), run);
    else if (command == "sweep-neighborhood")
        run_sweep_neighborhood(SweepNeighborhoodParams::from_json(params), run);
    else if (command == "sweep-beta")
        run_sweep_beta(SweepBetaParams::from_json(params), run);
    else if (command == "sweep-subset")
        run_sweep_subset(SweepSubsetParams::from_json(params), run);
    else
        throw std::invalid_argument("rerun: unknown command '" + command + "' in manifest");
}

void run_rerun(const std::string& manifest_path, RunDir& run) {
    const io::Manifest manifest = io::read_manifest(manifest_path);
    dispatch(manifest.command, manifest.params, run);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anchorhull: personalization toolkit over anchor sets and dilated hulls"};
    app.require_subcommand(1);
    app.footer(kExitCodeHelp);

    std::string out_dir = "out";
    std::string beta_text, betas_text;

    FixtureParams fixture_p;
    auto* c_fixture = app.add_subcommand("fixture", "generate a self-contained experiment setup");
    c_fixture->add_option("--seed", fixture_p.seed);
    c_fixture->add_option("--latent-dim", fixture_p.latent_dim);
    c_fixture->add_option("--layers", fixture_p.layers);
    c_fixture->add_option("--hidden", fixture_p.hidden);
    c_fixture->add_option("--signal-dim", fixture_p.signal_dim);
    c_fixture->add_option("--count", fixture_p.count, "number of anchors");
    c_fixture->add_option("--perturb", fixture_p.perturb);
    c_fixture->add_option("--out", out_dir);

    TuneParams tune_p;
    auto* c_tune =
        app.add_subcommand("tune", "adapt a generator to reconstruct references from anchors");
    c_tune->add_option("--anchors", tune_p.anchors)->required();
    c_tune->add_option("--weights", tune_p.weights)->required();
    c_tune->add_option("--refs", tune_p.refs)->required();
    c_tune->add_option("--steps", tune_p.steps);
    c_tune->add_option("--lr", tune_p.lr);
    c_tune->add_option("--lambda-l2", tune_p.lambda_l2);
    c_tune->add_option("--out", out_dir);

    ProjectParams invert_p, inpaint_p, superres_p;
    inpaint_p.beta = 0.02;
    superres_p.beta = 0.05;
    invert_p.beta = 0.02;

    auto add_projection_flags = [&](CLI::App* cmd, ProjectParams& p) {
        cmd->add_option("--anchors", p.anchors)->required();
        cmd->add_option("--weights", p.weights)->required();
        cmd->add_option("--input", p.input)->required();
        cmd->add_option("--mode", p.mode, "alpha|alpha-plus|w|w-plus");
        cmd->add_option("--steps", p.steps);
        cmd->add_option("--lr", p.lr);
        cmd->add_option("--sharpness", p.sharpness);
        cmd->add_option("--lambda-reg", p.lambda_reg);
        cmd->add_option("--reg-cutoff", p.reg_cutoff);
        cmd->add_flag("--clamp-base-only", p.clamp_base_only);
        cmd->add_option("--out", out_dir);
    };

    auto* c_invert = app.add_subcommand("invert", "project a signal onto the dilated hull");
    add_projection_flags(c_invert, invert_p);
    auto* o_invert_beta = c_invert->add_option("--beta", beta_text, "non-negative or 'unbounded'");

    auto* c_inpaint =
        app.add_subcommand("inpaint", "recover masked coordinates through the hull prior");
    add_projection_flags(c_inpaint, inpaint_p);
    c_inpaint->add_option("--mask", inpaint_p.mask)->required();
    auto* o_inpaint_beta = c_inpaint->add_option("--beta", beta_text);

    auto* c_superres =
        app.add_subcommand("superres", "upsample a block-averaged signal through the hull prior");
    add_projection_flags(c_superres, superres_p);
    c_superres->add_option("--factor", superres_p.factor);
    auto* o_superres_beta = c_superres->add_option("--beta", beta_text);

    EditParams edit_p;
    auto* c_edit = app.add_subcommand("edit", "traverse a personalized editing direction");
    c_edit->add_option("--anchors", edit_p.anchors)->required();
    c_edit->add_option("--alpha", edit_p.alpha)->required();
    c_edit->add_option("--direction", edit_p.direction)->required();
    c_edit->add_option("--weights", edit_p.weights);
    c_edit->add_option("--theta", edit_p.theta);
    auto* o_edit_beta = c_edit->add_option("--beta", beta_text);
    c_edit->add_option("--policy", edit_p.policy, "stop|project");
    c_edit->add_flag("--deflate", edit_p.deflate_direction,
                     "subtract mean(gamma) so traversal keeps the sum-1 slice");
    c_edit->add_option("--out", out_dir);

    SampleParams sample_p;
    auto* c_sample = app.add_subcommand("sample", "draw sparse convex combinations of the anchors");
    c_sample->add_option("--anchors", sample_p.anchors)->required();
    c_sample->add_option("--weights", sample_p.weights);
    c_sample->add_option("--count", sample_p.count);
    c_sample->add_option("--seed", sample_p.seed);
    c_sample->add_option("--out", out_dir);

    SweepInterpParams interp_p;
    auto* c_interp =
        app.add_subcommand("sweep-interp", "identity preservation along anchor interpolations");
    c_interp->add_option("--anchors", interp_p.anchors)->required();
    c_interp->add_option("--weights-before", interp_p.weights_before)->required();
    c_interp->add_option("--weights-after", interp_p.weights_after)->required();
    c_interp->add_option("--refs", interp_p.refs)->required();
    c_interp->add_option("--pairs", interp_p.pairs);
    c_interp->add_option("--steps-per-pair", interp_p.steps_per_pair);
    c_interp->add_option("--seed", interp_p.seed);
    c_interp->add_option("--feature-dim", interp_p.feature_dim);
    c_interp->add_option("--feature-seed", interp_p.feature_seed);
    c_interp->add_option("--out", out_dir);

    SweepNeighborhoodParams nbr_p;
    auto* c_nbr =
        app.add_subcommand("sweep-neighborhood", "identity decay along random latent walks");
    c_nbr->add_option("--anchors", nbr_p.anchors)->required();
    c_nbr->add_option("--weights", nbr_p.weights)->required();
    c_nbr->add_option("--radii", nbr_p.radii, "comma-separated, ascending from 0");
    c_nbr->add_option("--directions", nbr_p.directions, "walks per anchor");
    c_nbr->add_option("--seed", nbr_p.seed);
    c_nbr->add_option("--feature-dim", nbr_p.feature_dim);
    c_nbr->add_option("--feature-seed", nbr_p.feature_seed);
    c_nbr->add_option("--out", out_dir);

    SweepBetaParams beta_p;
    auto* c_beta =
        app.add_subcommand("sweep-beta", "reconstruction/identity tradeoff over dilation budgets");
    c_beta->add_option("--anchors", beta_p.anchors)->required();
    c_beta->add_option("--weights", beta_p.weights)->required();
    c_beta->add_option("--inputs", beta_p.inputs)->required();
    c_beta->add_option("--refs", beta_p.refs)->required();
    c_beta->add_option("--betas", betas_text, "comma-separated budgets incl. 'unbounded'");
    c_beta->add_option("--mode", beta_p.mode);
    c_beta->add_option("--steps", beta_p.steps);
    c_beta->add_option("--lr", beta_p.lr);
    c_beta->add_option("--sharpness", beta_p.sharpness);
    c_beta->add_option("--lambda-reg", beta_p.lambda_reg);
    c_beta->add_option("--feature-dim", beta_p.feature_dim);
    c_beta->add_option("--feature-seed", beta_p.feature_seed);
    c_beta->add_option("--out", out_dir);

    SweepSubsetParams subset_p;
    auto* c_subset = app.add_subcommand("sweep-subset", "reference-set size/diversity ablation");
    c_subset->add_option("--anchors", subset_p.anchors)->required();
    c_subset->add_option("--weights", subset_p.weights, "starting (domain) generator")->required();
    c_subset->add_option("--refs", subset_p.refs)->required();
    c_subset->add_option("--heldout", subset_p.heldout)->required();
    c_subset->add_option("--sizes", subset_p.sizes);
    c_subset->add_option("--repeats", subset_p.repeats);
    c_subset->add_option("--seed", subset_p.seed);
    c_subset->add_option("--tune-steps", subset_p.tune_steps);
    c_subset->add_option("--tune-lr", subset_p.tune_lr);
    c_subset->add_option("--steps", subset_p.steps);
    c_subset->add_option("--lr", subset_p.lr);
    auto* o_subset_beta = c_subset->add_option("--beta", beta_text);
    c_subset->add_option("--mode", subset_p.mode);
    c_subset->add_option("--out", out_dir);

    std::string manifest_path;
    auto* c_rerun = app.add_subcommand("rerun", "re-execute a command from its manifest");
    c_rerun->add_option("--manifest", manifest_path)->required();
    c_rerun->add_option("--out", out_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunDir run{fs::path(out_dir)};
        if (c_fixture->parsed()) {
            run_fixture(fixture_p, run);
        } else if (c_tune->parsed()) {
            run_tune(tune_p, run);
        } else if (c_invert->parsed()) {
            if (o_invert_beta->count()) invert_p.beta = parse_beta(beta_text);
            run_invert(invert_p, run);
        } else if (c_inpaint->parsed()) {
            if (o_inpaint_beta->count()) inpaint_p.beta = parse_beta(beta_text);
            run_inpaint(inpaint_p, run);
        } else if (c_superres->parsed()) {
            if (o_superres_beta->count()) superres_p.beta = parse_beta(beta_text);
            run_superres(superres_p, run);
        } else if (c_edit->parsed()) {
            if (o_edit_beta->count()) edit_p.beta = parse_beta(beta_text);
            run_edit(edit_p, run);
        } else if (c_sample->parsed()) {
            run_sample(sample_p, run);
        } else if (c_interp->parsed()) {
            run_sweep_interp(interp_p, run);
        } else if (c_nbr->parsed()) {
            run_sweep_neighborhood(nbr_p, run);
        } else if (c_beta->parsed()) {
            if (!betas_text.empty()) beta_p.betas = betas_text;
            run_sweep_beta(beta_p, run);
        } else if (c_subset->parsed()) {
            if (o_subset_beta->count()) subset_p.beta = parse_beta(beta_text);
            run_sweep_subset(subset_p, run);
        } else if (c_rerun->parsed()) {
            run_rerun(manifest_path, run);
        }
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
