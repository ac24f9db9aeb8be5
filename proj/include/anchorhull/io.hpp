#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "anchorhull/anchor_set.hpp"
#include "anchorhull/evaluation.hpp"
#include "anchorhull/generator.hpp"

namespace anchorhull::io {

namespace fs = std::filesystem;

/// Failure while reading or writing artifacts; carries the offending path
/// in the message.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Full round-trip decimal formatting (17 significant digits).
std::string format_double(double v);

// --- text matrix format ----------------------------------------------------
// First line "k N"; then N lines of k space-separated decimals, each
// optionally followed by "# label". Anchors, signals, directions and
// coordinate vectors all use this layout (one vector per row).

struct TextMatrix {
    MatrixXd rows;  // N x k, matching the file layout
    std::vector<std::string> labels;
};

TextMatrix read_matrix(const fs::path& path);
void write_matrix(const fs::path& path, const MatrixXd& rows,
                  const std::vector<std::string>& labels = {});

AnchorSet read_anchors(const fs::path& path);
void write_anchors(const fs::path& path, const AnchorSet& anchors);

std::vector<Signal> read_signals(const fs::path& path);
void write_signals(const fs::path& path, const std::vector<Signal>& signals);
Signal read_signal(const fs::path& path);  // exactly one row
void write_signal(const fs::path& path, const Signal& signal);

VectorXd read_direction(const fs::path& path);  // exactly one row

AlphaCode read_alpha(const fs::path& path);
void write_alpha(const fs::path& path, const AlphaCode& alpha);

LatentCode read_latent(const fs::path& path);  // one row per layer
void write_latent(const fs::path& path, const LatentCode& latent);

// --- mask format -------------------------------------------------------
// One line of d space-separated 0/1 values.

VectorXd read_mask(const fs::path& path);
void write_mask(const fs::path& path, const VectorXd& mask);

// --- weight snapshots ----------------------------------------------------
// Binary, little-endian float64 payload behind a dimension header.

LayeredGenerator read_weights(const fs::path& path);
void write_weights(const fs::path& path, const LayeredGenerator& gen);

// --- traces and reports ----------------------------------------------------

void write_trace_csv(const fs::path& path, const std::vector<double>& trace);
std::vector<double> read_trace_csv(const fs::path& path);

void write_report_csv(const fs::path& path, const SweepReport& report);
void write_report_summary(const fs::path& path, const SweepReport& report);

// --- manifests ------------------------------------------------------------

std::string sha256_file(const fs::path& path);

/// One manifest per CLI run: the command, its full parameter set, and a
/// content hash for every artifact written (paths relative to the output
/// directory). Re-running a command from its manifest must reproduce the
/// same hashes.
struct Manifest {
    std::string command;
    nlohmann::json params;
    std::map<std::string, std::string> artifacts;
};

void write_manifest(const fs::path& path, const Manifest& manifest);
Manifest read_manifest(const fs::path& path);

}  // namespace anchorhull::io
