#pragma once

#include "tcforge/core.hpp"
#include "tcforge/prompt.hpp"
#include "tcforge/sandbox.hpp"
#include "tcforge/toolchain.hpp"

#include <string>
#include <vector>

namespace tcforge {

struct GeneratorFailed : Error {
    GeneratorFailed(int row_, std::string detail)
        : Error(ErrorFamily::forge,
                "generator failed on row " + std::to_string(row_) + ": " + detail),
          row(row_) {}
    int row;
};

struct ModelSolutionFailed : Error {
    ModelSolutionFailed(int index_, std::string detail)
        : Error(ErrorFamily::forge,
                "model solution failed on case " + std::to_string(index_) + ": " + detail),
          index(index_) {}
    int index;
};

struct CaseReport {
    int index = 0;
    std::int64_t generator_cpu_ms = 0;
    bool validator_pass = false;
};

struct ForgeReport {
    TestSuite suite;
    std::vector<CaseReport> per_case;
    std::string model_solution_id;
    bool determinism_checked = false;
};

struct ValidationResult {
    int index = 0;
    bool pass = false;
    std::string message;
};

struct ForgeEnv {
    Sandbox& sandbox;
    ToolchainSpec toolchain;
    fs::path compile_cache_dir;
    int workers = 1;
};

/// Generators and validators are trusted more than contestant code but still
/// run fenced; these are the ceilings they get.
Limits generator_limits();

/// Runs the generator once per param row (1-based); captured stdout becomes
/// test{i}.in. Any non-clean run aborts with GeneratorFailed for that row.
/// cpu_out, when given, receives per-row generator CPU times.
std::vector<TestCase> generate_inputs(const fs::path& generator,
                                      const std::vector<std::string>& param_rows, ForgeEnv& env,
                                      std::vector<std::int64_t>* cpu_out = nullptr);

/// Streams each input to the validator's stdin; exit 0 is a pass, anything
/// else a failure with the captured stderr as message.
std::vector<ValidationResult> validate_inputs(const fs::path& validator,
                                              const std::vector<TestCase>& cases, ForgeEnv& env);

/// Runs the model solution over every input with the time limit scaled by
/// `relaxation`; stdout becomes expected_bytes. A run with any limit flag or
/// abnormal exit aborts with ModelSolutionFailed.
std::vector<TestCase> produce_expected(const fs::path& model_binary, std::vector<TestCase> cases,
                                       const Limits& limits, double relaxation, ForgeEnv& env);

struct ForgeOptions {
    std::string suite_label = "ai";
    double time_relaxation = 2.0;
};

/// The full pipeline: compile both components, generate, validate (all cases
/// must pass), regenerate and byte-compare for determinism, produce expected
/// outputs, assemble the suite. The first failing stage propagates as
/// ForgeError annotated with the stage name.
ForgeReport forge_suite(const Problem& problem, const GeneratorBundle& bundle,
                        const Submission& model_solution, ForgeEnv& env,
                        const ForgeOptions& options = {});

} // namespace tcforge
