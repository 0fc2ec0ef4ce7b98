#include "tcforge/toolchain.hpp"

#include "tcforge/errors.hpp"

#include <algorithm>
#include <mutex>

namespace tcforge {

void validate(const ToolchainSpec& spec) {
    if (spec.toolchain_id.empty()) throw ConfigError("toolchain_id must be non-empty");
    if (spec.compile_command.empty()) throw ConfigError("compile_command must be non-empty");
    auto count = [&](const std::string& slot) {
        return std::count_if(spec.compile_command.begin(), spec.compile_command.end(),
                             [&](const std::string& arg) {
                                 return arg.find(slot) != std::string::npos;
                             });
    };
    if (count("{src}") != 1 || count("{out}") != 1)
        throw ConfigError("toolchain " + spec.toolchain_id +
                          ": compile_command must contain {src} and {out} exactly once");
}

ToolchainSpec default_cpp17_toolchain(const std::vector<fs::path>& header_search_paths) {
    ToolchainSpec spec;
    spec.toolchain_id = "cpp17";
    spec.compile_command = {"g++", "-O2", "-std=c++17", "-o", "{out}", "{src}"};
    spec.source_suffix = ".cpp";
    spec.header_search_paths = header_search_paths;
    return spec;
}

fs::path compile_component(const std::string& source, const ToolchainSpec& toolchain,
                           Sandbox& sandbox, const fs::path& cache_dir) {
    validate(toolchain);

    std::string cmd_fingerprint;
    for (const auto& arg : toolchain.compile_command) {
        cmd_fingerprint += arg;
        cmd_fingerprint += '\x1f';
    }
    for (const auto& inc : toolchain.header_search_paths) {
        cmd_fingerprint += inc.string();
        cmd_fingerprint += '\x1f';
    }
    const std::string hash = sha256_hex(cmd_fingerprint + source);

    fs::path slot = cache_dir / hash;
    fs::path binary = slot / "prog";
    fs::path src_file = slot / ("src" + toolchain.source_suffix);

    // One compile at a time per process; concurrent identical requests reuse
    // the first result.
    static std::mutex compile_mutex;
    std::lock_guard lock(compile_mutex);
    if (fs::exists(binary)) return binary;

    fs::create_directories(slot);
    write_file(src_file, source);

    ExecSpec spec;
    for (const auto& arg : toolchain.compile_command) {
        std::string expanded = arg;
        auto replace_slot = [&](const std::string& slot_name, const std::string& value) {
            size_t pos = expanded.find(slot_name);
            if (pos != std::string::npos) expanded.replace(pos, slot_name.size(), value);
        };
        replace_slot("{src}", src_file.string());
        replace_slot("{out}", binary.string());
        spec.command.push_back(expanded);
    }
    for (const auto& inc : toolchain.header_search_paths)
        spec.command.push_back("-I" + inc.string());

    spec.limits.time_limit_ms = 60000;
    spec.limits.memory_limit_mib = 3072;
    spec.limits.output_limit_bytes = 4 * 1024 * 1024;
    spec.wall_multiplier = 2.0;
    spec.network = NetworkIsolation::off; // compilers may probe the filesystem freely

    RunOutcome outcome = sandbox.run_limited(spec);
    std::string diagnostics = outcome.stderr_excerpt;
    discard_run(outcome);

    if (!outcome.exit_status.normal() || !fs::exists(binary)) {
        std::error_code ec;
        fs::remove_all(slot, ec);
        throw CompileError(diagnostics.empty() ? describe(outcome) : diagnostics);
    }
    return binary;
}

} // namespace tcforge
