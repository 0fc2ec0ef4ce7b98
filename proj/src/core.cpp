#include "tcforge/core.hpp"

#include "tcforge/errors.hpp"
#include "tcforge/util.hpp"

#include <algorithm>
#include <set>

namespace tcforge {

void validate(const Limits& limits) {
    if (limits.time_limit_ms <= 0) throw ConfigError("time_limit_ms must be positive");
    if (limits.time_limit_ms > 60000) throw ConfigError("time_limit_ms must be <= 60000");
    if (limits.memory_limit_mib <= 0) throw ConfigError("memory_limit_mib must be positive");
    if (limits.output_limit_bytes < 1) throw ConfigError("output_limit_bytes must be >= 1");
}

void validate(const Problem& problem) {
    if (problem.id.empty()) throw ConfigError("problem id must be non-empty");
    if (problem.statement_markdown.empty())
        throw ConfigError("problem " + problem.id + ": statement must be non-empty");
    validate(problem.limits);
    if (problem.checker.kind == CheckerKind::external && problem.checker.program.empty())
        throw ConfigError("problem " + problem.id + ": external checker needs a program path");
}

void validate(const TestSuite& suite) {
    std::set<std::string> names;
    int prev = 0;
    for (const auto& tc : suite.cases) {
        if (tc.index <= prev)
            throw ConfigError("suite " + suite.label + ": case indices must be strictly increasing");
        prev = tc.index;
        if (!names.insert(tc.input_name).second)
            throw ConfigError("suite " + suite.label + ": duplicate input name " + tc.input_name);
    }
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::AC: return "AC";
    case Verdict::WA: return "WA";
    case Verdict::TLE: return "TLE";
    case Verdict::MLE: return "MLE";
    case Verdict::RE: return "RE";
    }
    return "?";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "AC") return Verdict::AC;
    if (s == "WA") return Verdict::WA;
    if (s == "TLE") return Verdict::TLE;
    if (s == "MLE") return Verdict::MLE;
    if (s == "RE") return Verdict::RE;
    throw ConfigError("unknown verdict: " + s);
}

const char* to_string(Origin o) {
    switch (o) {
    case Origin::contest: return "contest";
    case Origin::upsolve: return "upsolve";
    case Origin::fixture: return "fixture";
    }
    return "?";
}

Origin origin_from_string(const std::string& s) {
    if (s == "contest") return Origin::contest;
    if (s == "upsolve") return Origin::upsolve;
    if (s == "fixture") return Origin::fixture;
    throw ConfigError("unknown submission origin: " + s);
}

bool full_pass(const SuiteResult& result) {
    if (result.compile_failed) return false;
    return std::all_of(result.per_test.begin(), result.per_test.end(),
                       [](const TestVerdict& t) { return t.verdict == Verdict::AC; });
}

TestSuite normalize_names(TestSuite suite) {
    int total = static_cast<int>(suite.cases.size());
    for (int i = 0; i < total; i++) {
        suite.cases[i].index = i + 1;
        suite.cases[i].input_name = test_stem(i + 1, total) + ".in";
    }
    return suite;
}

TestSuite merge_suites(const TestSuite& a, const TestSuite& b) {
    TestSuite merged;
    merged.label = a.label + "+" + b.label;
    merged.cases.reserve(a.cases.size() + b.cases.size());
    merged.cases.insert(merged.cases.end(), a.cases.begin(), a.cases.end());
    merged.cases.insert(merged.cases.end(), b.cases.begin(), b.cases.end());
    return normalize_names(std::move(merged));
}

} // namespace tcforge
