#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tcforge {

/// Resource ceilings for one judged run.
struct Limits {
    std::int64_t time_limit_ms = 1000;
    std::int64_t memory_limit_mib = 256;
    std::int64_t output_limit_bytes = 16 * 1024 * 1024;
};

/// Throws ConfigError unless all limits are positive and time <= 60000 ms.
void validate(const Limits& limits);

enum class CheckerKind { token_compare, external };

struct Checker {
    CheckerKind kind = CheckerKind::token_compare;
    std::string program; // path, only for CheckerKind::external
};

struct Problem {
    std::string id;
    std::string statement_markdown;
    Limits limits;
    Checker checker;
    std::vector<std::string> tags;
};

void validate(const Problem& problem);

struct TestCase {
    int index = 0;                            // 1-based, contiguous within a suite
    std::string input_name;                   // testNN.in
    std::string input_bytes;
    std::optional<std::string> expected_bytes; // absent until expected-output production
};

struct TestSuite {
    std::string label;
    std::vector<TestCase> cases;
};

void validate(const TestSuite& suite);

enum class Origin { contest, upsolve, fixture };

Origin origin_from_string(const std::string& s);
const char* to_string(Origin o);

struct Submission {
    std::string id;
    std::string source_text;
    std::string toolchain_id;
    Origin origin = Origin::fixture;
};

enum class Verdict { AC, WA, TLE, MLE, RE };

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct TestVerdict {
    int index = 0;
    Verdict verdict = Verdict::AC;
    std::int64_t cpu_ms = 0;
    std::int64_t peak_mem_mib = 0;
};

/// Per-test verdicts for one submission against one suite. If compile_failed,
/// per_test is empty and the submission cannot be a full pass.
struct SuiteResult {
    std::string submission_id;
    std::string suite_label;
    std::vector<TestVerdict> per_test;
    bool compile_failed = false;
};

/// True iff the submission compiled and every test verdict is AC.
bool full_pass(const SuiteResult& result);

/// Concatenates a's cases then b's, re-indexed from 1 and renamed testNN.in;
/// label becomes "a.label+b.label". Input bytes are copied unchanged.
TestSuite merge_suites(const TestSuite& a, const TestSuite& b);

/// Re-indexes cases contiguously from 1 preserving order; names zero-padded
/// to width 2 for suites of up to 99 cases, digit count of N beyond that.
TestSuite normalize_names(TestSuite suite);

} // namespace tcforge
