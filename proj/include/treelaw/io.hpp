#pragma once

/**
 * Artifact writers for the command-line tool: CSV tables for curves and
 * sample dumps, a JSON run manifest for reproducibility. Numbers are printed
 * with 17 significant digits so files round-trip doubles exactly and reruns
 * with the same seed are byte-identical.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "treelaw/grid.hpp"

namespace treelaw {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest-roundtrip decimal form of v ("%.17g").
std::string format_double(double v);

/// Writes a header line plus numeric rows; parent directories must exist.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Recursively creates a directory for run outputs.
void ensure_directory(const std::string& dir);

/// Writes a square matrix sampled on a grid. The header row and the first
/// column both carry the grid points, so cell (i, j) of the payload is
/// values[i * n + j] evaluated at (x_i, x_j).
void write_matrix_csv(const std::string& path, const Grid& grid,
                      const std::vector<double>& values);

struct RunManifest {
    std::string command;      ///< the subcommand that ran
    std::string config_path;  ///< empty when the model came from flags
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;  ///< files written, manifest excluded
    std::string timestamp;
    std::string tool_version = kToolVersion;
};

/// ISO-8601 UTC stamp; reads SOURCE_DATE_EPOCH when set so archived runs can
/// be reproduced byte for byte.
std::string manifest_timestamp();

/// Writes dir/run_manifest.json.
std::string write_manifest(const std::string& dir, const RunManifest& manifest);

}  // namespace treelaw
