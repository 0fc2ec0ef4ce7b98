#pragma once

#include "tcforge/sandbox.hpp"
#include "tcforge/util.hpp"

#include <string>
#include <vector>

namespace tcforge {

/// How to turn one source file into a runnable binary. compile_command is an
/// argv template containing {src} and {out} exactly once each;
/// header_search_paths are appended as -I flags (gcc-style toolchains).
struct ToolchainSpec {
    std::string toolchain_id;
    std::vector<std::string> compile_command;
    std::string source_suffix = ".cpp";
    std::vector<fs::path> header_search_paths;
};

void validate(const ToolchainSpec& spec);

ToolchainSpec default_cpp17_toolchain(const std::vector<fs::path>& header_search_paths = {});

/// Compiles source text under the sandbox and returns the binary path.
/// Results are cached by content hash of (source, command), so identical
/// sources compile once per cache directory. Throws CompileError with the
/// compiler diagnostics on failure.
fs::path compile_component(const std::string& source, const ToolchainSpec& toolchain,
                           Sandbox& sandbox, const fs::path& cache_dir);

} // namespace tcforge
