#include "tcforge/exchange.hpp"

#include "tcforge/errors.hpp"
#include "tcforge/zipfile.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>

namespace tcforge {

using nlohmann::json;

ArchiveFormat archive_format_from_string(const std::string& s) {
    if (s == "flat_zip" || s == "zip") return ArchiveFormat::flat_zip;
    if (s == "cms_dir" || s == "cms") return ArchiveFormat::cms_dir;
    throw ConfigError("unknown archive format: " + s);
}

json manifest_to_json(const Manifest& manifest) {
    json arr = json::array();
    for (const auto& e : manifest)
        arr.push_back(json{{"name", e.name}, {"size", e.size}, {"sha256", e.sha256}});
    return arr;
}

Manifest manifest_from_json(const json& doc) {
    Manifest manifest;
    for (const auto& e : doc) {
        ManifestEntry entry;
        entry.name = e.at("name").get<std::string>();
        entry.size = e.at("size").get<std::uint64_t>();
        entry.sha256 = e.at("sha256").get<std::string>();
        manifest.push_back(std::move(entry));
    }
    return manifest;
}

namespace {

std::string stem_of(const std::string& filename, const std::string& suffix) {
    if (filename.size() <= suffix.size() ||
        filename.compare(filename.size() - suffix.size(), suffix.size(), suffix) != 0)
        return {};
    return filename.substr(0, filename.size() - suffix.size());
}

// Sorts stems by trailing number when present ("test2" before "test10").
bool stem_less(const std::string& a, const std::string& b) {
    auto split_key = [](const std::string& s) -> std::pair<std::string, long long> {
        size_t i = s.size();
        while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) i--;
        long long num = -1;
        if (i < s.size()) num = std::stoll(s.substr(i));
        return {s.substr(0, i), num};
    };
    auto [pa, na] = split_key(a);
    auto [pb, nb] = split_key(b);
    if (pa != pb) return pa < pb;
    if (na != nb) return na < nb;
    return a < b;
}

void require_complete(const TestSuite& suite) {
    for (const auto& tc : suite.cases)
        if (!tc.expected_bytes)
            throw IncompleteSuite("case " + tc.input_name + " has no expected output");
}

ManifestEntry manifest_entry(const std::string& name, const std::string& bytes) {
    return {name, bytes.size(), sha256_hex(bytes)};
}

TestSuite pair_stems(std::map<std::string, std::string> inputs,
                     std::map<std::string, std::string> expected, const std::string& label) {
    for (const auto& [stem, _] : expected)
        if (!inputs.count(stem)) throw OrphanFile(stem);

    std::vector<std::string> stems;
    stems.reserve(inputs.size());
    for (const auto& [stem, _] : inputs) {
        if (!expected.count(stem)) throw OrphanFile(stem);
        stems.push_back(stem);
    }
    std::sort(stems.begin(), stems.end(), stem_less);

    TestSuite suite;
    suite.label = label;
    for (const auto& stem : stems) {
        TestCase tc;
        tc.input_bytes = std::move(inputs.at(stem));
        tc.expected_bytes = std::move(expected.at(stem));
        suite.cases.push_back(std::move(tc));
    }
    return normalize_names(std::move(suite));
}

} // namespace

Manifest export_archive(const TestSuite& suite, ArchiveFormat format, const fs::path& dest,
                        const std::string& ok_suffix) {
    require_complete(suite);

    Manifest manifest;
    switch (format) {
    case ArchiveFormat::flat_zip: {
        std::vector<ZipEntry> entries;
        for (const auto& tc : suite.cases) {
            std::string stem = stem_of(tc.input_name, ".in");
            entries.push_back({tc.input_name, tc.input_bytes});
            entries.push_back({stem + ok_suffix, *tc.expected_bytes});
        }
        write_zip(dest, entries);
        for (const auto& e : entries) manifest.push_back(manifest_entry(e.name, e.bytes));
        break;
    }
    case ArchiveFormat::cms_dir: {
        fs::create_directories(dest / "input");
        fs::create_directories(dest / "output");
        for (const auto& tc : suite.cases) {
            std::string stem = stem_of(tc.input_name, ".in");
            write_file(dest / "input" / tc.input_name, tc.input_bytes);
            write_file(dest / "output" / (stem + ok_suffix), *tc.expected_bytes);
            manifest.push_back(manifest_entry("input/" + tc.input_name, tc.input_bytes));
            manifest.push_back(manifest_entry("output/" + stem + ok_suffix, *tc.expected_bytes));
        }
        break;
    }
    }
    return manifest;
}

namespace {

TestSuite import_flat_zip(const fs::path& src, const std::string& label,
                          const std::string& ok_suffix) {
    std::map<std::string, std::string> inputs, expected;
    for (auto& entry : read_zip(src)) {
        if (entry.name.find('/') != std::string::npos)
            throw UnrecognizedLayout("unexpected directory entry in flat archive: " + entry.name);
        if (std::string stem = stem_of(entry.name, ".in"); !stem.empty())
            inputs[stem] = std::move(entry.bytes);
        else if (std::string ok_stem = stem_of(entry.name, ok_suffix); !ok_stem.empty())
            expected[ok_stem] = std::move(entry.bytes);
        else
            throw UnrecognizedLayout("unexpected file in flat archive: " + entry.name);
    }
    if (inputs.empty()) throw UnrecognizedLayout("archive holds no *.in files");
    return pair_stems(std::move(inputs), std::move(expected), label);
}

TestSuite import_cms_dir(const fs::path& src, const std::string& label,
                         const std::string& ok_suffix) {
    fs::path in_dir = src / "input";
    fs::path out_dir = src / "output";
    if (!fs::is_directory(in_dir) || !fs::is_directory(out_dir))
        throw UnrecognizedLayout(src.string() + " lacks input/ and output/ directories");

    std::map<std::string, std::string> inputs, expected;
    for (const auto& e : fs::directory_iterator(in_dir)) {
        if (!e.is_regular_file()) continue;
        std::string name = e.path().filename().string();
        std::string stem = stem_of(name, ".in");
        if (stem.empty()) stem = e.path().stem().string();
        inputs[stem] = read_file(e.path());
    }
    for (const auto& e : fs::directory_iterator(out_dir)) {
        if (!e.is_regular_file()) continue;
        std::string name = e.path().filename().string();
        std::string stem = stem_of(name, ok_suffix);
        if (stem.empty())
            throw UnrecognizedLayout("expected file without the " + ok_suffix +
                                     " suffix: " + name);
        expected[stem] = read_file(e.path());
    }
    if (inputs.empty()) throw UnrecognizedLayout("input/ directory holds no test files");
    return pair_stems(std::move(inputs), std::move(expected), label);
}

} // namespace

TestSuite import_archive(const fs::path& src, std::optional<ArchiveFormat> hint,
                         const std::string& label, const std::string& ok_suffix) {
    if (!fs::exists(src)) throw UnrecognizedLayout("no such archive: " + src.string());
    if (hint) {
        switch (*hint) {
        case ArchiveFormat::flat_zip: return import_flat_zip(src, label, ok_suffix);
        case ArchiveFormat::cms_dir: return import_cms_dir(src, label, ok_suffix);
        }
    }
    if (looks_like_zip(src)) return import_flat_zip(src, label, ok_suffix);
    if (fs::is_directory(src)) return import_cms_dir(src, label, ok_suffix);
    throw UnrecognizedLayout(src.string() + " is neither a zip archive nor a cms directory");
}

void write_suite_dir(const TestSuite& suite, const fs::path& dir, const std::string& ok_suffix) {
    fs::create_directories(dir);
    for (const auto& tc : suite.cases) {
        write_file(dir / tc.input_name, tc.input_bytes);
        if (tc.expected_bytes) {
            std::string stem = stem_of(tc.input_name, ".in");
            write_file(dir / (stem + ok_suffix), *tc.expected_bytes);
        }
    }
}

TestSuite load_suite_dir(const fs::path& dir, const std::string& label,
                         const std::string& ok_suffix) {
    if (!fs::is_directory(dir)) throw UnrecognizedLayout("no such suite directory: " + dir.string());
    std::map<std::string, std::string> inputs, expected;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string name = e.path().filename().string();
        if (std::string stem = stem_of(name, ".in"); !stem.empty())
            inputs[stem] = read_file(e.path());
        else if (std::string ok_stem = stem_of(name, ok_suffix); !ok_stem.empty())
            expected[ok_stem] = read_file(e.path());
    }
    if (inputs.empty()) throw UnrecognizedLayout(dir.string() + " holds no *.in files");
    return pair_stems(std::move(inputs), std::move(expected), label);
}

} // namespace tcforge
