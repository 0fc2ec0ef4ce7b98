#include "tcforge/judge.hpp"

#include "tcforge/errors.hpp"

#include <algorithm>
#include <atomic>
#include <future>

namespace tcforge {

bool compare_tokens(std::string_view expected, std::string_view actual) {
    size_t i = 0, j = 0;
    auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    };
    for (;;) {
        while (i < expected.size() && is_ws(expected[i])) i++;
        while (j < actual.size() && is_ws(actual[j])) j++;
        if (i == expected.size() || j == actual.size()) break;
        size_t ie = i, je = j;
        while (ie < expected.size() && !is_ws(expected[ie])) ie++;
        while (je < actual.size() && !is_ws(actual[je])) je++;
        if (expected.substr(i, ie - i) != actual.substr(j, je - j)) return false;
        i = ie;
        j = je;
    }
    while (i < expected.size() && is_ws(expected[i])) i++;
    while (j < actual.size() && is_ws(actual[j])) j++;
    return i == expected.size() && j == actual.size();
}

namespace {

bool run_external_checker(const Checker& checker, const CheckContext& ctx,
                          const std::string& expected, const std::string& actual) {
    if (!ctx.sandbox)
        throw CheckerFailure("external checker requires a sandbox context");

    static std::atomic<std::uint64_t> check_id{1};
    fs::path dir = ctx.sandbox->scratch_root() /
                   ("check-" + std::to_string(check_id.fetch_add(1)));
    fs::create_directories(dir);
    write_file(dir / "input", ctx.input_bytes);
    write_file(dir / "actual", actual);
    write_file(dir / "expected", expected);

    ExecSpec spec;
    spec.command = {checker.program, (dir / "input").string(), (dir / "actual").string(),
                    (dir / "expected").string()};
    spec.limits.time_limit_ms = 10000;
    spec.limits.memory_limit_mib = 512;
    spec.limits.output_limit_bytes = 1024 * 1024;

    RunOutcome outcome = ctx.sandbox->run_limited(spec);
    bool crashed = outcome.exit_status.kind == ExitStatus::Kind::killed || !outcome.flags.empty();
    int code = outcome.exit_status.code;
    std::string detail = describe(outcome);
    discard_run(outcome);
    std::error_code ec;
    fs::remove_all(dir, ec);

    if (crashed) throw CheckerFailure("external checker crashed: " + detail);
    return code == 0;
}

} // namespace

Verdict verdict_of(const RunOutcome& outcome, const std::string& expected,
                   const std::string& actual, const Checker& checker, const CheckContext& ctx) {
    if (outcome.has(RunFlag::time_exceeded)) return Verdict::TLE;
    if (outcome.has(RunFlag::memory_exceeded)) return Verdict::MLE;
    if (outcome.exit_status.kind == ExitStatus::Kind::killed || outcome.exit_status.code != 0)
        return Verdict::RE;

    bool accepted = checker.kind == CheckerKind::token_compare
                        ? compare_tokens(expected, actual)
                        : run_external_checker(checker, ctx, expected, actual);
    return accepted ? Verdict::AC : Verdict::WA;
}

SuiteResult judge_submission(const Submission& submission, const TestSuite& suite,
                             const Problem& problem, JudgeEnv& env, const JudgeOptions& options) {
    for (const auto& tc : suite.cases)
        if (!tc.expected_bytes)
            throw Error(ErrorFamily::judge, "suite " + suite.label + " case " + tc.input_name +
                                                " has no expected output");

    SuiteResult result;
    result.submission_id = submission.id;
    result.suite_label = suite.label;

    fs::path binary;
    try {
        binary = compile_component(submission.source_text, env.toolchain, env.sandbox,
                                   env.compile_cache_dir);
    } catch (const CompileError&) {
        result.compile_failed = true;
        return result;
    }

    static std::atomic<std::uint64_t> judge_id{1};
    fs::path staged = env.sandbox.scratch_root() /
                      ("judge-stage-" + std::to_string(judge_id.fetch_add(1)));
    fs::create_directories(staged);
    for (const auto& tc : suite.cases) write_file(staged / tc.input_name, tc.input_bytes);

    auto run_case = [&](const TestCase& tc) {
        ExecSpec spec;
        spec.command = {binary.string()};
        spec.stdin_source = staged / tc.input_name;
        spec.limits = problem.limits;

        RunOutcome outcome = env.sandbox.run_limited(spec);
        if (options.retry_near_limit && !outcome.has(RunFlag::time_exceeded) &&
            outcome.cpu_ms * 100 >= problem.limits.time_limit_ms * 95) {
            RunOutcome second = env.sandbox.run_limited(spec);
            bool second_worse =
                second.has(RunFlag::time_exceeded) || second.cpu_ms > outcome.cpu_ms;
            if (second_worse) {
                discard_run(outcome);
                outcome = std::move(second);
            } else {
                discard_run(second);
            }
        }
        std::string actual = slurp_stdout(outcome);

        TestVerdict verdict;
        verdict.index = tc.index;
        verdict.cpu_ms = outcome.cpu_ms;
        verdict.peak_mem_mib = outcome.peak_mem_mib;
        CheckContext ctx{&env.sandbox, tc.input_bytes};
        verdict.verdict = verdict_of(outcome, *tc.expected_bytes, actual, problem.checker, ctx);
        discard_run(outcome);
        return verdict;
    };

    if (options.workers > 1 && !options.early_exit && suite.cases.size() > 1) {
        ThreadPool pool(static_cast<unsigned>(
            std::min<size_t>(options.workers, suite.cases.size())));
        std::vector<std::future<TestVerdict>> futures;
        futures.reserve(suite.cases.size());
        for (const auto& tc : suite.cases)
            futures.push_back(pool.submit([&run_case, &tc] { return run_case(tc); }));
        for (auto& f : futures) result.per_test.push_back(f.get());
    } else {
        for (const auto& tc : suite.cases) {
            result.per_test.push_back(run_case(tc));
            if (options.early_exit && result.per_test.back().verdict != Verdict::AC) break;
        }
    }

    std::error_code ec;
    fs::remove_all(staged, ec);
    return result;
}

} // namespace tcforge
