#pragma once

#include "tcforge/util.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tcforge {

enum class PromptVersion { v1, v2 };

struct PromptTemplate {
    PromptVersion version = PromptVersion::v2;
    std::string body; // UTF-8 text with {statement} and, for v2, {model_generator}/{model_batch}
};

/// Loads prompt_v1.txt / prompt_v2.txt from `dir` and checks the expected
/// opening line (v1) / the argv-and-cout instruction (v2).
PromptTemplate load_template(PromptVersion version, const fs::path& dir);

struct PromptContext {
    std::string statement;
    std::optional<std::string> model_generator; // required by v2
    std::optional<std::string> model_batch;     // required by v2
    int requested_case_count = 25;
};

/// Substitutes slots; throws MissingSlot when the body references a slot the
/// context does not provide. The case-count sentence is rewritten only when
/// requested_case_count differs from the stored default of 25.
std::string render_prompt(const PromptTemplate& tmpl, const PromptContext& ctx);

/// The four artifacts expected from one model response. batch_script is kept
/// for the record but never executed; param_rows drive generation.
struct GeneratorBundle {
    std::string generator_source;
    std::string validator_source;
    std::vector<std::string> param_rows; // one argv row per entry, file order
    std::optional<std::string> batch_script;
};

/// Extracts fenced code blocks from a Markdown response and classifies them
/// as generator / validator / param table / batch script. Labels win over
/// content idioms; unresolvable responses throw rather than guess.
GeneratorBundle parse_bundle(const std::string& response, int expected_count);

/// Formats a bundle back into labeled fenced blocks (parse_bundle inverse on
/// generator/validator/params).
std::string serialize_bundle_markdown(const GeneratorBundle& bundle);

void write_bundle(const GeneratorBundle& bundle, const fs::path& dir);
GeneratorBundle load_bundle(const fs::path& dir, int expected_count);

enum class FindingCategory { ForbiddenConstruct, DuplicateParams, BoundsViolation };

struct Finding {
    FindingCategory category;
    std::string message;
    int row = 0; // 1-based param row when applicable, else 0
};

const char* to_string(FindingCategory c);

/// Optional per-problem machine-readable bounds on generator argv positions.
struct ParamBounds {
    struct Entry {
        int arg_index = 0; // 0-based position within a param row
        std::string name;
        long long min = 0;
        long long max = 0;
    };
    std::vector<Entry> entries;
};

std::vector<Finding> lint_bundle(const GeneratorBundle& bundle,
                                 const std::optional<ParamBounds>& bounds = std::nullopt);

} // namespace tcforge
