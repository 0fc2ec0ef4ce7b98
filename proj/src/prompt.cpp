#include "tcforge/prompt.hpp"

#include "tcforge/errors.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <regex>
#include <sstream>

namespace tcforge {

namespace {

constexpr const char* kV1Opening = "You are given a competitive programming problem in markdown";
constexpr const char* kV2Marker = "Use argvs for parameters, cout for printing";
constexpr const char* kCountPhrase = "a set of 25 test case parameters";

} // namespace

PromptTemplate load_template(PromptVersion version, const fs::path& dir) {
    PromptTemplate tmpl;
    tmpl.version = version;
    tmpl.body = read_file(dir / (version == PromptVersion::v1 ? "prompt_v1.txt" : "prompt_v2.txt"));
    if (version == PromptVersion::v1 && tmpl.body.rfind(kV1Opening, 0) != 0)
        throw ConfigError("prompt_v1.txt does not begin with the expected opening sentence");
    if (version == PromptVersion::v2 && tmpl.body.find(kV2Marker) == std::string::npos)
        throw ConfigError("prompt_v2.txt is missing the argv/cout instruction");
    return tmpl;
}

std::string render_prompt(const PromptTemplate& tmpl, const PromptContext& ctx) {
    if (ctx.requested_case_count < 1)
        throw ConfigError("requested_case_count must be >= 1");

    std::map<std::string, const std::string*> slots;
    slots["statement"] = &ctx.statement;
    if (ctx.model_generator) slots["model_generator"] = &*ctx.model_generator;
    if (ctx.model_batch) slots["model_batch"] = &*ctx.model_batch;

    std::string out;
    out.reserve(tmpl.body.size() + ctx.statement.size());
    for (size_t i = 0; i < tmpl.body.size();) {
        if (tmpl.body[i] == '{') {
            size_t close = tmpl.body.find('}', i);
            if (close != std::string::npos) {
                std::string name = tmpl.body.substr(i + 1, close - i - 1);
                if (!name.empty() &&
                    std::all_of(name.begin(), name.end(),
                                [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; })) {
                    auto it = slots.find(name);
                    if (it == slots.end()) throw MissingSlot(name);
                    out += *it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl.body[i++];
    }

    if (ctx.requested_case_count != 25) {
        std::string replacement =
            "a set of " + std::to_string(ctx.requested_case_count) + " test case parameters";
        size_t pos = 0;
        while ((pos = out.find(kCountPhrase, pos)) != std::string::npos) {
            out.replace(pos, std::string(kCountPhrase).size(), replacement);
            pos += replacement.size();
        }
    }
    return out;
}

namespace {

struct FencedBlock {
    std::string label; // nearest preceding non-blank line outside any fence
    std::string info;  // fence info string, e.g. "cpp"
    std::string content;
};

std::vector<FencedBlock> extract_blocks(const std::string& text) {
    std::vector<FencedBlock> blocks;
    auto lines = split_lines(text);
    std::string last_context;
    for (size_t i = 0; i < lines.size(); i++) {
        std::string stripped = trim(lines[i]);
        bool fence = stripped.rfind("```", 0) == 0 || stripped.rfind("~~~", 0) == 0;
        if (!fence) {
            if (!stripped.empty()) last_context = stripped;
            continue;
        }
        std::string marker = stripped.substr(0, 3);
        FencedBlock block;
        block.label = last_context;
        block.info = to_lower(trim(stripped.substr(3)));
        std::string content;
        size_t j = i + 1;
        for (; j < lines.size(); j++) {
            if (trim(lines[j]).rfind(marker, 0) == 0) break;
            content += lines[j];
            content += '\n';
        }
        block.content = std::move(content);
        blocks.push_back(std::move(block));
        i = j;
        last_context.clear();
    }
    return blocks;
}

std::string clean_label(const std::string& raw) {
    std::string s = to_lower(raw);
    std::string out;
    for (char c : s)
        if (std::isalnum(static_cast<unsigned char>(c)) || c == ' ') out += c;
    return out;
}

bool looks_like_param_rows(const std::string& content) {
    auto lines = split_lines(content);
    int rows = 0;
    for (const auto& line : lines) {
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t.find_first_of(";{}()<>#%=\\") != std::string::npos) return false;
        if (contains_ci(t, ".exe") || contains_ci(t, "echo")) return false;
        rows++;
    }
    return rows >= 1;
}

bool looks_like_batch(const std::string& content) {
    if (contains_ci(content, "@echo off")) return true;
    if (contains_ci(content, "for /l")) return true;
    std::string lower = to_lower(content);
    return lower.find(".exe") != std::string::npos && lower.find('>') != std::string::npos;
}

enum Role { kGenerator, kValidator, kParams, kBatch, kRoleCount };

const char* role_name(int role) {
    switch (role) {
    case kGenerator: return "generator";
    case kValidator: return "validator";
    case kParams: return "parameters";
    case kBatch: return "batch";
    }
    return "?";
}

bool label_matches(int role, const std::string& label) {
    switch (role) {
    case kGenerator:
        return label.find("generator") != std::string::npos &&
               label.find("validator") == std::string::npos;
    case kValidator: return label.find("validator") != std::string::npos;
    case kParams:
        return label.find("parameter") != std::string::npos ||
               label.find("params") != std::string::npos;
    case kBatch:
        return label.find("batch") != std::string::npos || label.find("bat ") != std::string::npos;
    }
    return false;
}

bool content_matches(int role, const FencedBlock& block) {
    switch (role) {
    case kGenerator:
        return block.content.find("registerGen") != std::string::npos ||
               (block.content.find("testlib") != std::string::npos &&
                block.content.find("argv") != std::string::npos);
    case kValidator:
        return block.content.find("registerValidation") != std::string::npos ||
               block.content.find("readEof") != std::string::npos;
    case kParams: return looks_like_param_rows(block.content);
    case kBatch:
        return block.info == "bat" || block.info == "cmd" || block.info == "batch" ||
               looks_like_batch(block.content);
    }
    return false;
}

} // namespace

GeneratorBundle parse_bundle(const std::string& response, int expected_count) {
    auto blocks = extract_blocks(response);

    std::array<int, kRoleCount> assigned;
    assigned.fill(-1);
    std::vector<bool> taken(blocks.size(), false);

    // Explicit labels first.
    for (int role = 0; role < kRoleCount; role++) {
        for (size_t b = 0; b < blocks.size(); b++) {
            if (taken[b]) continue;
            if (!label_matches(role, clean_label(blocks[b].label))) continue;
            if (assigned[role] != -1)
                throw BundleAmbiguous(std::string("two blocks labeled as ") + role_name(role));
            assigned[role] = static_cast<int>(b);
            taken[b] = true;
        }
    }

    // Content idioms for whatever the labels left open. Batch and params have
    // the most distinctive shapes, so they go first.
    for (int role : {kBatch, kParams, kValidator, kGenerator}) {
        if (assigned[role] != -1) continue;
        int match = -1;
        for (size_t b = 0; b < blocks.size(); b++) {
            if (taken[b]) continue;
            if (!content_matches(role, blocks[b])) continue;
            if (match != -1)
                throw BundleAmbiguous(std::string("two unlabeled blocks look like the ") +
                                      role_name(role));
            match = static_cast<int>(b);
        }
        if (match != -1) {
            assigned[role] = match;
            taken[match] = true;
        }
    }

    std::vector<std::string> missing;
    for (int role : {kGenerator, kValidator, kParams})
        if (assigned[role] == -1) missing.push_back(role_name(role));
    if (!missing.empty()) throw BundleIncomplete(missing);

    GeneratorBundle bundle;
    bundle.generator_source = blocks[assigned[kGenerator]].content;
    bundle.validator_source = blocks[assigned[kValidator]].content;
    for (const auto& line : split_lines(blocks[assigned[kParams]].content)) {
        std::string row = trim(line);
        if (!row.empty()) bundle.param_rows.push_back(row);
    }
    if (assigned[kBatch] != -1) bundle.batch_script = blocks[assigned[kBatch]].content;

    if (static_cast<int>(bundle.param_rows.size()) != expected_count)
        throw ParamCountMismatch(static_cast<int>(bundle.param_rows.size()), expected_count);
    if (bundle.generator_source.empty() || bundle.validator_source.empty())
        throw BundleIncomplete({bundle.generator_source.empty() ? "generator" : "validator"});
    return bundle;
}

std::string serialize_bundle_markdown(const GeneratorBundle& bundle) {
    std::ostringstream out;
    out << "### Test case generator\n\n```cpp\n" << bundle.generator_source << "```\n\n";
    out << "### Validator\n\n```cpp\n" << bundle.validator_source << "```\n\n";
    out << "### Test case parameters\n\n```\n";
    for (const auto& row : bundle.param_rows) out << row << '\n';
    out << "```\n";
    if (bundle.batch_script)
        out << "\n### Batch file\n\n```bat\n" << *bundle.batch_script << "```\n";
    return out.str();
}

void write_bundle(const GeneratorBundle& bundle, const fs::path& dir) {
    fs::create_directories(dir);
    write_file(dir / "generator.cpp", bundle.generator_source);
    write_file(dir / "validator.cpp", bundle.validator_source);
    std::string params;
    for (const auto& row : bundle.param_rows) {
        params += row;
        params += '\n';
    }
    write_file(dir / "params.txt", params);
    if (bundle.batch_script) write_file(dir / "run_tests.bat", *bundle.batch_script);
}

GeneratorBundle load_bundle(const fs::path& dir, int expected_count) {
    GeneratorBundle bundle;
    bundle.generator_source = read_file(dir / "generator.cpp");
    bundle.validator_source = read_file(dir / "validator.cpp");
    for (const auto& line : split_lines(read_file(dir / "params.txt"))) {
        std::string row = trim(line);
        if (!row.empty()) bundle.param_rows.push_back(row);
    }
    if (fs::exists(dir / "run_tests.bat")) bundle.batch_script = read_file(dir / "run_tests.bat");
    if (expected_count > 0 && static_cast<int>(bundle.param_rows.size()) != expected_count)
        throw ParamCountMismatch(static_cast<int>(bundle.param_rows.size()), expected_count);
    if (bundle.generator_source.empty()) throw BundleIncomplete({"generator"});
    if (bundle.validator_source.empty()) throw BundleIncomplete({"validator"});
    return bundle;
}

const char* to_string(FindingCategory c) {
    switch (c) {
    case FindingCategory::ForbiddenConstruct: return "ForbiddenConstruct";
    case FindingCategory::DuplicateParams: return "DuplicateParams";
    case FindingCategory::BoundsViolation: return "BoundsViolation";
    }
    return "?";
}

std::vector<Finding> lint_bundle(const GeneratorBundle& bundle,
                                 const std::optional<ParamBounds>& bounds) {
    std::vector<Finding> findings;

    static const std::regex opt_call(R"(\bopt\s*[<(])");
    if (std::regex_search(bundle.generator_source, opt_call))
        findings.push_back({FindingCategory::ForbiddenConstruct,
                            "generator calls testlib's opt() directly", 0});

    std::map<std::string, int> seen;
    for (size_t i = 0; i < bundle.param_rows.size(); i++) {
        auto [it, fresh] = seen.emplace(bundle.param_rows[i], static_cast<int>(i) + 1);
        if (!fresh)
            findings.push_back({FindingCategory::DuplicateParams,
                                "row " + std::to_string(i + 1) + " duplicates row " +
                                    std::to_string(it->second),
                                static_cast<int>(i) + 1});
    }

    if (bounds) {
        for (size_t i = 0; i < bundle.param_rows.size(); i++) {
            auto tokens = split_ws(bundle.param_rows[i]);
            for (const auto& entry : bounds->entries) {
                if (entry.arg_index < 0 || entry.arg_index >= static_cast<int>(tokens.size()))
                    continue;
                const std::string& tok = tokens[entry.arg_index];
                errno = 0;
                char* end = nullptr;
                long long value = std::strtoll(tok.c_str(), &end, 10);
                if (errno != 0 || end == tok.c_str() || *end != '\0') continue; // non-numeric
                if (value < entry.min || value > entry.max)
                    findings.push_back({FindingCategory::BoundsViolation,
                                        "row " + std::to_string(i + 1) + ": " + entry.name + "=" +
                                            tok + " outside [" + std::to_string(entry.min) + ", " +
                                            std::to_string(entry.max) + "]",
                                        static_cast<int>(i) + 1});
            }
        }
    }
    return findings;
}

} // namespace tcforge
