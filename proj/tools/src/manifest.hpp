// manifest.hpp: Atomic file output with SHA-256 checksums

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace squidbath::cli {

// Lowercase hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes `content` to `<path>.tmp` and renames it over `path`, so readers
/// never observe a partially written file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// ISO-8601 UTC, second resolution.
std::string utc_timestamp();

struct OutputRecord {
    std::filesystem::path path;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

// Writes an output file atomically and returns its checksum as read back from disk.
OutputRecord emit_file(const std::filesystem::path& path, const std::string& content);

nlohmann::json to_json(const OutputRecord& r);

}  // namespace squidbath::cli
