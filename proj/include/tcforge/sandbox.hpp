#pragma once

#include "tcforge/core.hpp"
#include "tcforge/util.hpp"

#include <atomic>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace tcforge {

/// Measurement slack the verdict layer may rely on: CPU readings are
/// accurate to +-50 ms, memory peaks to +-2 MiB.
inline constexpr std::int64_t kCpuSlackMs = 50;
inline constexpr std::int64_t kMemSlackMiB = 2;

enum class NetworkIsolation { off, try_unshare, require };

struct ExecSpec {
    std::vector<std::string> command;
    fs::path stdin_source;  // empty -> /dev/null
    fs::path working_dir;   // empty -> fresh per-run scratch subdirectory
    Limits limits;
    double wall_multiplier = 3.0; // wall ceiling = time_limit * multiplier
    NetworkIsolation network = NetworkIsolation::try_unshare;
};

struct ExitStatus {
    enum class Kind { exited, killed };
    Kind kind = Kind::exited;
    int code = 0;   // exit code when exited, signal number when killed
    std::string cause; // "cpu-limit", "wall-limit", or signal name

    bool normal() const { return kind == Kind::exited && code == 0; }
};

enum class RunFlag { time_exceeded, memory_exceeded, output_truncated };

struct RunOutcome {
    ExitStatus exit_status;
    std::int64_t cpu_ms = 0;
    std::int64_t wall_ms = 0;
    std::int64_t peak_mem_mib = 0;
    fs::path stdout_path;
    fs::path run_dir;
    std::string stderr_excerpt; // first 4 KiB
    std::set<RunFlag> flags;

    bool has(RunFlag f) const { return flags.count(f) > 0; }
    /// exited(0) with no limit flags.
    bool clean() const { return exit_status.normal() && flags.empty(); }
};

std::string describe(const RunOutcome& outcome);

/// Runs child processes under enforced CPU, wall, address-space and output
/// ceilings. Each run gets a scratch directory {run_id}/stdin,stdout,stderr
/// under the configured root. Thread-safe; runs may execute concurrently.
///
/// Enforcement is rlimit-based (RLIMIT_AS hard cap plus a poll loop over
/// /proc). A process that dies abnormally after its address space reached
/// the cap (within kMemSlackMiB) is flagged memory_exceeded; an allocation
/// request that fails far below the cap surfaces as a plain runtime error.
class Sandbox {
public:
    explicit Sandbox(fs::path scratch_root);

    RunOutcome run_limited(const ExecSpec& spec);

    const fs::path& scratch_root() const { return scratch_root_; }

private:
    fs::path scratch_root_;
    std::atomic<std::uint64_t> next_run_id_{1};
};

std::string slurp_stdout(const RunOutcome& outcome);

/// Deletes the run's scratch directory.
void discard_run(const RunOutcome& outcome);

} // namespace tcforge
