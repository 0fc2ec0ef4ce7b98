#pragma once

#include "tcforge/util.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tcforge {

struct ZipEntry {
    std::string name;
    std::string bytes;
};

/// Writes a zip archive with stored (uncompressed) entries and a fixed
/// timestamp, so identical inputs produce identical archives.
void write_zip(const fs::path& dest, const std::vector<ZipEntry>& entries);
std::string write_zip_to_string(const std::vector<ZipEntry>& entries);

/// Reads stored or deflated entries; validates CRCs.
std::vector<ZipEntry> read_zip(const fs::path& src);
std::vector<ZipEntry> read_zip_from_string(const std::string& data);

bool looks_like_zip(const fs::path& path);

} // namespace tcforge
