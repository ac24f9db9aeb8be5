#include "anchorhull/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace anchorhull::io {

namespace {

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
    throw IoError(path.string() + ": " + what);
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) fail(path, "cannot open for reading");
    return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) fail(path, "cannot open for writing");
    return out;
}

double parse_double(const std::string& tok, const fs::path& path, int line) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        fail(path, "line " + std::to_string(line) + ": cannot parse '" + tok + "' as a number");
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

TextMatrix read_matrix(const fs::path& path) {
    std::ifstream in = open_in(path);
    std::string header;
    if (!std::getline(in, header)) fail(path, "empty file");
    std::istringstream hs(header);
    long long k = 0, n = 0;
    if (!(hs >> k >> n) || k < 1 || n < 1)
        fail(path, "bad header '" + header + "', expected 'k N'");

    TextMatrix out;
    out.rows.resize(n, k);
    out.labels.assign(static_cast<size_t>(n), "");
    bool any_label = false;

    std::string line;
    for (long long r = 0; r < n; ++r) {
        if (!std::getline(in, line)) fail(path, "expected " + std::to_string(n) + " rows, got " +
                                                    std::to_string(r));
        std::string label;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) {
            label = line.substr(hash + 1);
            const size_t start = label.find_first_not_of(" \t");
            label = start == std::string::npos ? "" : label.substr(start);
            line = line.substr(0, hash);
            any_label = true;
        }
        std::istringstream ls(line);
        std::string tok;
        for (long long c = 0; c < k; ++c) {
            if (!(ls >> tok))
                fail(path, "line " + std::to_string(r + 2) + ": expected " + std::to_string(k) +
                               " values");
            out.rows(r, c) = parse_double(tok, path, static_cast<int>(r + 2));
        }
        if (ls >> tok) fail(path, "line " + std::to_string(r + 2) + ": trailing content '" + tok + "'");
        out.labels[static_cast<size_t>(r)] = label;
    }
    if (!any_label) out.labels.clear();
    return out;
}

void write_matrix(const fs::path& path, const MatrixXd& rows,
                  const std::vector<std::string>& labels) {
    if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != rows.rows())
        fail(path, "label count does not match row count");
    std::ofstream out = open_out(path);
    out << rows.cols() << ' ' << rows.rows() << '\n';
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) {
            if (c) out << ' ';
            out << format_double(rows(r, c));
        }
        if (!labels.empty() && !labels[static_cast<size_t>(r)].empty())
            out << " # " << labels[static_cast<size_t>(r)];
        out << '\n';
    }
    if (!out) fail(path, "write failed");
}

AnchorSet read_anchors(const fs::path& path) {
    TextMatrix m = read_matrix(path);
    return AnchorSet(m.rows.transpose(), std::move(m.labels));
}

void write_anchors(const fs::path& path, const AnchorSet& anchors) {
    write_matrix(path, anchors.matrix().transpose(), anchors.labels());
}

std::vector<Signal> read_signals(const fs::path& path) {
    const TextMatrix m = read_matrix(path);
    std::vector<Signal> out;
    out.reserve(static_cast<size_t>(m.rows.rows()));
    for (Eigen::Index r = 0; r < m.rows.rows(); ++r) out.emplace_back(m.rows.row(r).transpose());
    return out;
}

void write_signals(const fs::path& path, const std::vector<Signal>& signals) {
    if (signals.empty()) fail(path, "refusing to write an empty signal set");
    MatrixXd rows(static_cast<Eigen::Index>(signals.size()), signals.front().size());
    for (size_t i = 0; i < signals.size(); ++i) {
        if (signals[i].size() != rows.cols()) fail(path, "signals have mixed lengths");
        rows.row(static_cast<Eigen::Index>(i)) = signals[i].values.transpose();
    }
    write_matrix(path, rows);
}

Signal read_signal(const fs::path& path) {
    const TextMatrix m = read_matrix(path);
    if (m.rows.rows() != 1) fail(path, "expected exactly one signal row, got " +
                                           std::to_string(m.rows.rows()));
    return Signal(m.rows.row(0).transpose());
}

void write_signal(const fs::path& path, const Signal& signal) { write_signals(path, {signal}); }

VectorXd read_direction(const fs::path& path) {
    const TextMatrix m = read_matrix(path);
    if (m.rows.rows() != 1) fail(path, "expected exactly one direction row, got " +
                                           std::to_string(m.rows.rows()));
    return m.rows.row(0).transpose();
}

AlphaCode read_alpha(const fs::path& path) {
    const TextMatrix m = read_matrix(path);
    if (m.rows.rows() != 1) fail(path, "expected exactly one coordinate row, got " +
                                           std::to_string(m.rows.rows()));
    return AlphaCode(m.rows.row(0).transpose());
}

void write_alpha(const fs::path& path, const AlphaCode& alpha) {
    write_matrix(path, alpha.coeffs.transpose());
}

LatentCode read_latent(const fs::path& path) {
    const TextMatrix m = read_matrix(path);
    if (m.rows.rows() == 1) return LatentCode(VectorXd(m.rows.row(0).transpose()));
    std::vector<VectorXd> layers;
    layers.reserve(static_cast<size_t>(m.rows.rows()));
    for (Eigen::Index r = 0; r < m.rows.rows(); ++r) layers.emplace_back(m.rows.row(r).transpose());
    return LatentCode(std::move(layers));
}

void write_latent(const fs::path& path, const LatentCode& latent) {
    if (!latent.layered()) {
        write_matrix(path, latent.vector.transpose());
        return;
    }
    MatrixXd rows(static_cast<Eigen::Index>(latent.per_layer.size()), latent.per_layer.front().size());
    for (size_t l = 0; l < latent.per_layer.size(); ++l)
        rows.row(static_cast<Eigen::Index>(l)) = latent.per_layer[l].transpose();
    write_matrix(path, rows);
}

VectorXd read_mask(const fs::path& path) {
    std::ifstream in = open_in(path);
    std::vector<double> values;
    std::string tok;
    while (in >> tok) {
        const double v = parse_double(tok, path, 1);
        if (v != 0.0 && v != 1.0) fail(path, "mask entries must be 0 or 1, got '" + tok + "'");
        values.push_back(v);
    }
    if (values.empty()) fail(path, "empty mask");
    return Eigen::Map<const VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_mask(const fs::path& path, const VectorXd& mask) {
    std::ofstream out = open_out(path);
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
        if (i) out << ' ';
        out << (mask[i] == 0.0 ? '0' : '1');
    }
    out << '\n';
    if (!out) fail(path, "write failed");
}

// --- weight snapshots ----------------------------------------------------

namespace {

constexpr char kWeightMagic[8] = {'A', 'H', 'G', 'E', 'N', 'W', '0', '1'};

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        T out;
        auto* src = reinterpret_cast<const unsigned char*>(&v);
        auto* dst = reinterpret_cast<unsigned char*>(&out);
        for (size_t i = 0; i < sizeof(T); ++i) dst[i] = src[sizeof(T) - 1 - i];
        return out;
    }
}

void put_u32(std::ofstream& out, uint32_t v) {
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_u64(std::ofstream& out, uint64_t v) {
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t get_u32(std::ifstream& in, const fs::path& path) {
    uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) fail(path, "truncated header");
    return to_little(v);
}

uint64_t get_u64(std::ifstream& in, const fs::path& path) {
    uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) fail(path, "truncated header");
    return to_little(v);
}

void put_doubles(std::ofstream& out, const double* data, size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
    } else {
        for (size_t i = 0; i < count; ++i) {
            uint64_t bits;
            std::memcpy(&bits, &data[i], sizeof(bits));
            bits = to_little(bits);
            out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
        }
    }
}

void get_doubles(std::ifstream& in, double* data, size_t count, const fs::path& path) {
    if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double))))
        fail(path, "truncated weight payload");
    if constexpr (std::endian::native != std::endian::little) {
        for (size_t i = 0; i < count; ++i) {
            uint64_t bits;
            std::memcpy(&bits, &data[i], sizeof(bits));
            bits = to_little(bits);
            std::memcpy(&data[i], &bits, sizeof(bits));
        }
    }
}

// Row-major on disk regardless of Eigen's storage order.
void put_matrix(std::ofstream& out, const MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const Eigen::VectorXd row = m.row(r).transpose();
        put_doubles(out, row.data(), static_cast<size_t>(row.size()));
    }
}

void get_matrix(std::ifstream& in, MatrixXd& m, const fs::path& path) {
    VectorXd row(m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        get_doubles(in, row.data(), static_cast<size_t>(row.size()), path);
        m.row(r) = row.transpose();
    }
}

}  // namespace

void write_weights(const fs::path& path, const LayeredGenerator& gen) {
    std::ofstream out = open_out(path, std::ios::binary);
    out.write(kWeightMagic, sizeof(kWeightMagic));
    const GeneratorConfig& cfg = gen.config();
    put_u32(out, static_cast<uint32_t>(cfg.latent_dim));
    put_u32(out, static_cast<uint32_t>(cfg.num_layers));
    put_u32(out, static_cast<uint32_t>(cfg.hidden_dim));
    put_u32(out, static_cast<uint32_t>(cfg.output_dim));
    put_u32(out, cfg.activation == GeneratorConfig::Activation::Tanh ? 0u : 1u);
    put_u64(out, cfg.seed);

    put_doubles(out, gen.input_const.data(), static_cast<size_t>(gen.input_const.size()));
    for (int l = 0; l < cfg.num_layers; ++l) {
        put_matrix(out, gen.layer_weights[static_cast<size_t>(l)]);
        put_matrix(out, gen.style_weights[static_cast<size_t>(l)]);
        put_doubles(out, gen.biases[static_cast<size_t>(l)].data(),
                    static_cast<size_t>(gen.biases[static_cast<size_t>(l)].size()));
    }
    put_matrix(out, gen.readout);
    if (!out) fail(path, "write failed");
}

LayeredGenerator read_weights(const fs::path& path) {
    std::ifstream in = open_in(path, std::ios::binary);
    char magic[sizeof(kWeightMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kWeightMagic, sizeof(magic)) != 0)
        fail(path, "not a weight snapshot (bad magic)");

    GeneratorConfig cfg;
    cfg.latent_dim = static_cast<int>(get_u32(in, path));
    cfg.num_layers = static_cast<int>(get_u32(in, path));
    cfg.hidden_dim = static_cast<int>(get_u32(in, path));
    cfg.output_dim = static_cast<int>(get_u32(in, path));
    const uint32_t act = get_u32(in, path);
    if (act > 1) fail(path, "unknown activation code " + std::to_string(act));
    cfg.activation = act == 0 ? GeneratorConfig::Activation::Tanh
                              : GeneratorConfig::Activation::Identity;
    cfg.seed = get_u64(in, path);

    LayeredGenerator gen = LayeredGenerator::zero(cfg);
    get_doubles(in, gen.input_const.data(), static_cast<size_t>(gen.input_const.size()), path);
    for (int l = 0; l < cfg.num_layers; ++l) {
        get_matrix(in, gen.layer_weights[static_cast<size_t>(l)], path);
        get_matrix(in, gen.style_weights[static_cast<size_t>(l)], path);
        get_doubles(in, gen.biases[static_cast<size_t>(l)].data(),
                    static_cast<size_t>(gen.biases[static_cast<size_t>(l)].size()), path);
    }
    get_matrix(in, gen.readout, path);
    char extra;
    if (in.read(&extra, 1)) fail(path, "trailing bytes after weight payload");
    return gen;
}

// --- traces and reports ----------------------------------------------------

void write_trace_csv(const fs::path& path, const std::vector<double>& trace) {
    std::ofstream out = open_out(path);
    out << "step,loss\n";
    for (size_t i = 0; i < trace.size(); ++i) out << i << ',' << format_double(trace[i]) << '\n';
    if (!out) fail(path, "write failed");
}

std::vector<double> read_trace_csv(const fs::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != "step,loss") fail(path, "bad trace header");
    std::vector<double> trace;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos) fail(path, "line " + std::to_string(lineno) + ": no comma");
        trace.push_back(parse_double(line.substr(comma + 1), path, lineno));
    }
    return trace;
}

void write_report_csv(const fs::path& path, const SweepReport& report) {
    std::ofstream out = open_out(path);
    for (size_t c = 0; c < report.columns.size(); ++c) {
        if (c) out << ',';
        out << report.columns[c];
    }
    out << '\n';
    for (const auto& row : report.rows) {
        if (row.size() != report.columns.size()) fail(path, "row width does not match header");
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << format_double(row[c]);
        }
        out << '\n';
    }
    if (!out) fail(path, "write failed");
}

void write_report_summary(const fs::path& path, const SweepReport& report) {
    std::ofstream out = open_out(path);
    for (const auto& s : report.summaries) {
        out << s.metric << ".mean@" << format_double(s.axis) << " = " << format_double(s.mean)
            << '\n';
        out << s.metric << ".stddev@" << format_double(s.axis) << " = " << format_double(s.stddev)
            << '\n';
    }
    if (!out) fail(path, "write failed");
}

// --- manifests --------------------------------------------------------------

std::string sha256_file(const fs::path& path) {
    std::ifstream in = open_in(path, std::ios::binary);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("sha256: cannot allocate digest context");
    if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256: digest init failed");
    }
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
        if (!in) break;
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
    nlohmann::json j;
    j["command"] = manifest.command;
    j["params"] = manifest.params;
    j["artifacts"] = manifest.artifacts;
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) fail(path, "write failed");
}

Manifest read_manifest(const fs::path& path) {
    std::ifstream in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(path, std::string("bad manifest JSON: ") + e.what());
    }
    Manifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.params = j.at("params");
        m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
        fail(path, std::string("manifest missing fields: ") + e.what());
    }
    return m;
}

}  // namespace anchorhull::io
