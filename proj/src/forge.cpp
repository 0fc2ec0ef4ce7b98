#include "tcforge/forge.hpp"

#include <algorithm>

namespace tcforge {

namespace {

fs::path stage_inputs(const std::vector<TestCase>& cases, Sandbox& sandbox, const char* tag) {
    static std::atomic<std::uint64_t> staging_id{1};
    fs::path dir = sandbox.scratch_root() /
                   (std::string(tag) + "-stage-" + std::to_string(staging_id.fetch_add(1)));
    fs::create_directories(dir);
    for (const auto& tc : cases) write_file(dir / tc.input_name, tc.input_bytes);
    return dir;
}

template <typename Fn>
void for_each_parallel(int count, int workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; i++) fn(i);
        return;
    }
    ThreadPool pool(static_cast<unsigned>(std::min(workers, count)));
    std::vector<std::future<void>> futures;
    futures.reserve(count);
    for (int i = 0; i < count; i++) futures.push_back(pool.submit([&fn, i] { fn(i); }));
    std::exception_ptr first_error;
    for (auto& f : futures) {
        try {
            f.get();
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

Limits generator_limits() {
    Limits limits;
    limits.time_limit_ms = 20000;
    limits.memory_limit_mib = 2048;
    limits.output_limit_bytes = 256ll * 1024 * 1024;
    return limits;
}

std::vector<TestCase> generate_inputs(const fs::path& generator,
                                      const std::vector<std::string>& param_rows, ForgeEnv& env,
                                      std::vector<std::int64_t>* cpu_out) {
    if (param_rows.empty()) throw ForgeError("generate", "no param rows");
    const int total = static_cast<int>(param_rows.size());
    std::vector<TestCase> cases(total);
    std::vector<std::int64_t> cpu_ms(total, 0);

    for_each_parallel(total, env.workers, [&](int i) {
        ExecSpec spec;
        spec.command.push_back(generator.string());
        for (auto& tok : split_ws(param_rows[i])) spec.command.push_back(tok);
        spec.limits = generator_limits();

        RunOutcome outcome = env.sandbox.run_limited(spec);
        if (!outcome.clean()) {
            std::string detail = describe(outcome);
            if (!outcome.stderr_excerpt.empty())
                detail += "\n" + outcome.stderr_excerpt;
            discard_run(outcome);
            throw GeneratorFailed(i + 1, detail);
        }
        TestCase tc;
        tc.index = i + 1;
        tc.input_name = test_stem(i + 1, total) + ".in";
        tc.input_bytes = slurp_stdout(outcome);
        cpu_ms[i] = outcome.cpu_ms;
        discard_run(outcome);
        cases[i] = std::move(tc);
    });
    if (cpu_out) *cpu_out = std::move(cpu_ms);
    return cases;
}

std::vector<ValidationResult> validate_inputs(const fs::path& validator,
                                              const std::vector<TestCase>& cases, ForgeEnv& env) {
    fs::path staged = stage_inputs(cases, env.sandbox, "validate");
    std::vector<ValidationResult> results(cases.size());

    for_each_parallel(static_cast<int>(cases.size()), env.workers, [&](int i) {
        ExecSpec spec;
        spec.command = {validator.string()};
        spec.stdin_source = staged / cases[i].input_name;
        spec.limits = generator_limits();

        RunOutcome outcome = env.sandbox.run_limited(spec);
        ValidationResult result;
        result.index = cases[i].index;
        result.pass = outcome.exit_status.normal() && outcome.flags.empty();
        if (!result.pass)
            result.message = outcome.stderr_excerpt.empty() ? describe(outcome)
                                                            : trim(outcome.stderr_excerpt);
        discard_run(outcome);
        results[i] = std::move(result);
    });

    std::error_code ec;
    fs::remove_all(staged, ec);
    return results;
}

std::vector<TestCase> produce_expected(const fs::path& model_binary, std::vector<TestCase> cases,
                                       const Limits& limits, double relaxation, ForgeEnv& env) {
    Limits relaxed = limits;
    relaxed.time_limit_ms = std::min<std::int64_t>(
        60000, static_cast<std::int64_t>(limits.time_limit_ms * relaxation));

    fs::path staged = stage_inputs(cases, env.sandbox, "expected");

    for_each_parallel(static_cast<int>(cases.size()), env.workers, [&](int i) {
        ExecSpec spec;
        spec.command = {model_binary.string()};
        spec.stdin_source = staged / cases[i].input_name;
        spec.limits = relaxed;

        RunOutcome outcome = env.sandbox.run_limited(spec);
        if (!outcome.clean()) {
            std::string detail = describe(outcome);
            discard_run(outcome);
            throw ModelSolutionFailed(cases[i].index, detail);
        }
        cases[i].expected_bytes = slurp_stdout(outcome);
        discard_run(outcome);
    });

    std::error_code ec;
    fs::remove_all(staged, ec);
    return cases;
}

ForgeReport forge_suite(const Problem& problem, const GeneratorBundle& bundle,
                        const Submission& model_solution, ForgeEnv& env,
                        const ForgeOptions& options) {
    auto wrap = [](const char* stage, auto&& fn) -> decltype(fn()) {
        try {
            return fn();
        } catch (const ForgeError&) {
            throw;
        } catch (const Error& e) {
            throw ForgeError(stage, e.what());
        }
    };

    fs::path generator = wrap("compile-generator", [&] {
        return compile_component(bundle.generator_source, env.toolchain, env.sandbox,
                                 env.compile_cache_dir);
    });
    fs::path validator = wrap("compile-validator", [&] {
        return compile_component(bundle.validator_source, env.toolchain, env.sandbox,
                                 env.compile_cache_dir);
    });

    std::vector<std::int64_t> generator_cpu_ms;
    std::vector<TestCase> cases = wrap("generate", [&] {
        return generate_inputs(generator, bundle.param_rows, env, &generator_cpu_ms);
    });

    auto validations = validate_inputs(validator, cases, env);
    for (const auto& v : validations)
        if (!v.pass)
            throw ForgeError("validate",
                             "case " + std::to_string(v.index) + " rejected: " + v.message);

    // Determinism gate: a second full generation pass must reproduce every
    // input byte-for-byte, otherwise the suite cannot be re-judged or archived.
    std::vector<TestCase> second =
        wrap("determinism", [&] { return generate_inputs(generator, bundle.param_rows, env); });
    for (size_t i = 0; i < cases.size(); i++)
        if (cases[i].input_bytes != second[i].input_bytes)
            throw ForgeError("determinism", "case " + std::to_string(cases[i].index) +
                                                " differs between generation passes");

    fs::path model_binary = wrap("compile-model-solution", [&] {
        return compile_component(model_solution.source_text, env.toolchain, env.sandbox,
                                 env.compile_cache_dir);
    });
    cases = wrap("expected", [&] {
        return produce_expected(model_binary, std::move(cases), problem.limits,
                                options.time_relaxation, env);
    });

    ForgeReport report;
    report.suite.label = options.suite_label;
    report.suite.cases = std::move(cases);
    report.model_solution_id = model_solution.id;
    report.determinism_checked = true;
    for (size_t i = 0; i < report.suite.cases.size(); i++)
        report.per_case.push_back({report.suite.cases[i].index,
                                   i < generator_cpu_ms.size() ? generator_cpu_ms[i] : 0, true});
    validate(report.suite);
    return report;
}

} // namespace tcforge
