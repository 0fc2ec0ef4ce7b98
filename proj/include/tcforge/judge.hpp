#pragma once

#include "tcforge/core.hpp"
#include "tcforge/sandbox.hpp"
#include "tcforge/toolchain.hpp"

#include <string>
#include <string_view>

namespace tcforge {

/// True iff the whitespace-delimited token sequences are identical; trailing
/// newlines and whitespace run lengths are ignored.
bool compare_tokens(std::string_view expected, std::string_view actual);

struct CheckContext {
    Sandbox* sandbox = nullptr;   // required for external checkers
    std::string input_bytes;      // test input, handed to external checkers
};

/// Verdict precedence: TLE, then MLE, then RE, then the checker's AC/WA.
/// External checkers get (input, contestant output, expected output) files
/// and accept via exit code 0; a crashing checker throws CheckerFailure.
Verdict verdict_of(const RunOutcome& outcome, const std::string& expected,
                   const std::string& actual, const Checker& checker,
                   const CheckContext& ctx = {});

struct JudgeOptions {
    /// Stop after the first non-AC verdict. Off by default so differential
    /// metrics see complete verdict vectors; when on, per_test is truncated
    /// at the first failure.
    bool early_exit = false;
    /// Re-run once when a passing run lands within 5% under the time limit
    /// and keep the worse outcome; smooths flaky TLE boundaries.
    bool retry_near_limit = true;
    int workers = 1;
};

struct JudgeEnv {
    Sandbox& sandbox;
    ToolchainSpec toolchain;
    fs::path compile_cache_dir;
};

/// Compiles once, then judges every case of the suite in index order.
/// A compile failure yields SuiteResult{compile_failed=true} with no
/// per-test entries. Every case must carry expected_bytes.
SuiteResult judge_submission(const Submission& submission, const TestSuite& suite,
                             const Problem& problem, JudgeEnv& env,
                             const JudgeOptions& options = {});

} // namespace tcforge
