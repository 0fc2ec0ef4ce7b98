#pragma once

#include "tcforge/core.hpp"
#include "tcforge/util.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tcforge {

enum class ArchiveFormat {
    flat_zip, // testNN.in / testNN.ok at the archive root
    cms_dir,  // input/ and output/ directories with matched stems
};

ArchiveFormat archive_format_from_string(const std::string& s);

struct ManifestEntry {
    std::string name;
    std::uint64_t size = 0;
    std::string sha256;
};

using Manifest = std::vector<ManifestEntry>;

nlohmann::json manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const nlohmann::json& doc);

/// Writes the suite to `dest` (a .zip path for flat_zip, a directory for
/// cms_dir) and returns per-file name/size/hash. Every case needs
/// expected_bytes; bytes are written verbatim, never re-encoded.
Manifest export_archive(const TestSuite& suite, ArchiveFormat format, const fs::path& dest,
                        const std::string& ok_suffix = ".ok");

/// Reads an archive back into a suite with normalized names. Without a hint,
/// tries flat_zip then cms_dir. Inputs and expected files pair by exact stem;
/// anything unpaired raises OrphanFile.
TestSuite import_archive(const fs::path& src, std::optional<ArchiveFormat> hint = std::nullopt,
                         const std::string& label = "imported",
                         const std::string& ok_suffix = ".ok");

/// Plain on-disk suite layout used by forge and judge:
/// dir/testNN.in + dir/testNN.ok.
void write_suite_dir(const TestSuite& suite, const fs::path& dir,
                     const std::string& ok_suffix = ".ok");
TestSuite load_suite_dir(const fs::path& dir, const std::string& label,
                         const std::string& ok_suffix = ".ok");

} // namespace tcforge
