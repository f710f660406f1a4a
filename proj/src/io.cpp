#include "treelaw/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace treelaw {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out << ',';
        out << header[c];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv row width does not match the header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << format_double(row[c]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

void write_matrix_csv(const std::string& path, const Grid& grid,
                      const std::vector<double>& values) {
    const std::size_t n = static_cast<std::size_t>(grid.n);
    if (values.size() != n * n)
        throw std::invalid_argument("matrix size does not match the grid");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << 'x';
    for (std::size_t j = 0; j < n; ++j) out << ',' << format_double(grid.x(static_cast<int>(j)));
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out << format_double(grid.x(static_cast<int>(i)));
        for (std::size_t j = 0; j < n; ++j) out << ',' << format_double(values[i * n + j]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

std::string manifest_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* pinned = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(pinned, &end, 10);
        if (end != pinned && *end == '\0') t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string write_manifest(const std::string& dir, const RunManifest& manifest) {
    nlohmann::json j;
    j["command"] = manifest.command;
    j["config_path"] = manifest.config_path;
    j["seed"] = manifest.seed;
    j["outputs"] = manifest.outputs;
    j["timestamp"] = manifest.timestamp;
    j["tool_version"] = manifest.tool_version;
    const std::string path = dir + "/run_manifest.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
    return path;
}

}  // namespace treelaw
