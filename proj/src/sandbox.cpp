#include "tcforge/sandbox.hpp"

#include "tcforge/errors.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <string>

#include <fcntl.h>
#include <poll.h>
#include <sched.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace tcforge {

namespace {

constexpr size_t kStderrExcerptMax = 4096;
constexpr int kPollIntervalMs = 2;

struct Pipe {
    int read_fd = -1;
    int write_fd = -1;

    void open() {
        int fds[2];
        if (pipe(fds) != 0) throw SpawnFailure(std::string("pipe: ") + std::strerror(errno));
        read_fd = fds[0];
        write_fd = fds[1];
    }
    void close_read() {
        if (read_fd != -1) close(read_fd);
        read_fd = -1;
    }
    void close_write() {
        if (write_fd != -1) close(write_fd);
        write_fd = -1;
    }
    ~Pipe() {
        close_read();
        close_write();
    }
};

void set_nonblocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK); }

void set_rlimit(int resource, rlim_t value) {
    rlimit lim{value, value};
    setrlimit(resource, &lim);
}

/// utime+stime of a live process, in milliseconds. -1 when unreadable.
std::int64_t proc_cpu_ms(pid_t pid) {
    char path[64];
    std::snprintf(path, sizeof(path), "/proc/%d/stat", pid);
    FILE* f = std::fopen(path, "r");
    if (!f) return -1;
    char buf[1024];
    size_t n = std::fread(buf, 1, sizeof(buf) - 1, f);
    std::fclose(f);
    if (n == 0) return -1;
    buf[n] = '\0';
    // Fields after the parenthesized comm; utime/stime are fields 14/15.
    char* p = std::strrchr(buf, ')');
    if (!p) return -1;
    p++;
    unsigned long utime = 0, stime = 0;
    int field = 2; // comm was field 2
    for (char* tok = std::strtok(p, " "); tok; tok = std::strtok(nullptr, " ")) {
        field++;
        if (field == 14) utime = std::strtoul(tok, nullptr, 10);
        if (field == 15) {
            stime = std::strtoul(tok, nullptr, 10);
            break;
        }
    }
    long ticks = sysconf(_SC_CLK_TCK);
    if (ticks <= 0) ticks = 100;
    return static_cast<std::int64_t>((utime + stime) * 1000ull / static_cast<unsigned long>(ticks));
}

/// max(VmPeak, VmHWM) of a live process, in KiB. -1 when unreadable.
std::int64_t proc_peak_kib(pid_t pid) {
    char path[64];
    std::snprintf(path, sizeof(path), "/proc/%d/status", pid);
    FILE* f = std::fopen(path, "r");
    if (!f) return -1;
    std::int64_t peak = -1;
    char line[256];
    while (std::fgets(line, sizeof(line), f)) {
        long long kb = 0;
        if (std::sscanf(line, "VmPeak: %lld kB", &kb) == 1 ||
            std::sscanf(line, "VmHWM: %lld kB", &kb) == 1)
            peak = std::max<std::int64_t>(peak, kb);
    }
    std::fclose(f);
    return peak;
}

struct StreamSink {
    int fd = -1;           // nonblocking read end
    int out_fd = -1;       // file the bytes go to
    std::int64_t cap = -1; // write at most this many bytes to out_fd, -1 = all
    std::int64_t written = 0;
    std::int64_t total = 0;
    std::string* excerpt = nullptr;
    bool eof = false;

    // Returns false once the stream is exhausted.
    bool drain() {
        if (eof) return false;
        char buf[65536];
        for (;;) {
            ssize_t n = read(fd, buf, sizeof(buf));
            if (n > 0) {
                total += n;
                if (excerpt && excerpt->size() < kStderrExcerptMax)
                    excerpt->append(buf, std::min<size_t>(n, kStderrExcerptMax - excerpt->size()));
                std::int64_t want = n;
                if (cap >= 0) want = std::min<std::int64_t>(want, cap - written);
                if (want > 0 && out_fd != -1) {
                    ssize_t w = write(out_fd, buf, static_cast<size_t>(want));
                    if (w > 0) written += w;
                }
                continue;
            }
            if (n == 0) {
                eof = true;
                return false;
            }
            if (errno == EAGAIN || errno == EWOULDBLOCK) return true;
            if (errno == EINTR) continue;
            eof = true;
            return false;
        }
    }
};

const char* signal_name(int sig) {
    switch (sig) {
    case SIGKILL: return "SIGKILL";
    case SIGSEGV: return "SIGSEGV";
    case SIGABRT: return "SIGABRT";
    case SIGFPE: return "SIGFPE";
    case SIGBUS: return "SIGBUS";
    case SIGXCPU: return "SIGXCPU";
    case SIGXFSZ: return "SIGXFSZ";
    case SIGTERM: return "SIGTERM";
    default: return "signal";
    }
}

} // namespace

std::string describe(const RunOutcome& o) {
    std::string s = o.exit_status.kind == ExitStatus::Kind::exited
                        ? "exited(" + std::to_string(o.exit_status.code) + ")"
                        : "killed(" + o.exit_status.cause + ")";
    s += " cpu=" + std::to_string(o.cpu_ms) + "ms wall=" + std::to_string(o.wall_ms) +
         "ms mem=" + std::to_string(o.peak_mem_mib) + "MiB";
    for (RunFlag f : o.flags) {
        switch (f) {
        case RunFlag::time_exceeded: s += " [time_exceeded]"; break;
        case RunFlag::memory_exceeded: s += " [memory_exceeded]"; break;
        case RunFlag::output_truncated: s += " [output_truncated]"; break;
        }
    }
    return s;
}

Sandbox::Sandbox(fs::path scratch_root) : scratch_root_(std::move(scratch_root)) {
    if (access("/proc/self/stat", R_OK) != 0)
        throw SandboxUnavailable("/proc is not readable; cannot meter cpu/memory");
    fs::create_directories(scratch_root_);
}

RunOutcome Sandbox::run_limited(const ExecSpec& spec) {
    if (spec.command.empty()) throw SpawnFailure("empty command");
    validate(spec.limits);

    const std::uint64_t run_id = next_run_id_.fetch_add(1);
    fs::path run_dir = scratch_root_ / ("run-" + std::to_string(run_id));
    fs::create_directories(run_dir);

    fs::path stdin_path = run_dir / "stdin";
    if (spec.stdin_source.empty()) {
        stdin_path = "/dev/null";
    } else {
        if (!fs::exists(spec.stdin_source))
            throw SpawnFailure("stdin source missing: " + spec.stdin_source.string());
        fs::copy_file(spec.stdin_source, stdin_path, fs::copy_options::overwrite_existing);
    }

    fs::path work_dir = spec.working_dir;
    if (work_dir.empty()) {
        work_dir = run_dir / "work";
        fs::create_directories(work_dir);
    } else if (!fs::exists(work_dir)) {
        throw SpawnFailure("working_dir missing: " + work_dir.string());
    }

    fs::path stdout_path = run_dir / "stdout";
    fs::path stderr_path = run_dir / "stderr";

    const std::int64_t wall_limit_ms =
        static_cast<std::int64_t>(std::llround(static_cast<double>(spec.limits.time_limit_ms) *
                                               spec.wall_multiplier));

    Pipe out_pipe, err_pipe, status_pipe;
    out_pipe.open();
    err_pipe.open();
    status_pipe.open();
    fcntl(status_pipe.write_fd, F_SETFD, FD_CLOEXEC);

    std::vector<char*> argv;
    argv.reserve(spec.command.size() + 1);
    for (const auto& arg : spec.command) argv.push_back(const_cast<char*>(arg.c_str()));
    argv.push_back(nullptr);

    pid_t pid = fork();
    if (pid < 0) throw SpawnFailure(std::string("fork: ") + std::strerror(errno));

    if (pid == 0) {
        setpgid(0, 0);
        if (spec.network != NetworkIsolation::off) {
            if (unshare(CLONE_NEWNET) != 0 && spec.network == NetworkIsolation::require) {
                int err = errno;
                (void)!write(status_pipe.write_fd, &err, sizeof(err));
                _exit(126);
            }
        }

        set_rlimit(RLIMIT_AS, static_cast<rlim_t>(spec.limits.memory_limit_mib) * 1024 * 1024);
        // Kernel backstop one second past the metered CPU limit.
        set_rlimit(RLIMIT_CPU,
                   static_cast<rlim_t>((spec.limits.time_limit_ms + 999) / 1000 + 1));
        set_rlimit(RLIMIT_CORE, 0);

        int in_fd = open(stdin_path.c_str(), O_RDONLY);
        if (in_fd < 0) _exit(125);
        dup2(in_fd, STDIN_FILENO);
        dup2(out_pipe.write_fd, STDOUT_FILENO);
        dup2(err_pipe.write_fd, STDERR_FILENO);
        close(in_fd);
        out_pipe.close_read();
        out_pipe.close_write();
        err_pipe.close_read();
        err_pipe.close_write();
        status_pipe.close_read();

        if (chdir(work_dir.c_str()) != 0) {
            int err = errno;
            (void)!write(status_pipe.write_fd, &err, sizeof(err));
            _exit(125);
        }
        execvp(argv[0], argv.data());
        int err = errno;
        (void)!write(status_pipe.write_fd, &err, sizeof(err));
        _exit(127);
    }

    setpgid(pid, pid); // either parent or child wins; both set the same group
    out_pipe.close_write();
    err_pipe.close_write();
    status_pipe.close_write();
    set_nonblocking(out_pipe.read_fd);
    set_nonblocking(err_pipe.read_fd);
    set_nonblocking(status_pipe.read_fd);

    int stdout_fd = open(stdout_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    int stderr_fd = open(stderr_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);

    RunOutcome outcome;
    outcome.run_dir = run_dir;
    outcome.stdout_path = stdout_path;

    StreamSink out_sink{out_pipe.read_fd, stdout_fd, spec.limits.output_limit_bytes, 0, 0, nullptr};
    StreamSink err_sink{err_pipe.read_fd, stderr_fd,
                        static_cast<std::int64_t>(kStderrExcerptMax), 0, 0,
                        &outcome.stderr_excerpt};

    const auto start = std::chrono::steady_clock::now();
    auto wall_elapsed_ms = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    };

    std::int64_t observed_cpu_ms = 0;
    std::int64_t observed_peak_kib = 0;
    std::string kill_cause;
    int spawn_errno = 0;
    bool exited = false;
    int wait_status = 0;
    rusage usage{};

    auto kill_group = [&](const char* cause) {
        if (kill_cause.empty()) kill_cause = cause;
        kill(-pid, SIGKILL);
        kill(pid, SIGKILL);
    };

    while (!exited) {
        pollfd fds[3] = {{out_pipe.read_fd, POLLIN, 0},
                         {err_pipe.read_fd, POLLIN, 0},
                         {status_pipe.read_fd, POLLIN, 0}};
        poll(fds, 3, kPollIntervalMs);
        out_sink.drain();
        err_sink.drain();
        {
            int err = 0;
            ssize_t n = read(status_pipe.read_fd, &err, sizeof(err));
            if (n == static_cast<ssize_t>(sizeof(err))) spawn_errno = err;
        }

        pid_t reaped = wait4(pid, &wait_status, WNOHANG, &usage);
        if (reaped == pid) {
            exited = true;
            break;
        }

        std::int64_t cpu = proc_cpu_ms(pid);
        if (cpu > observed_cpu_ms) observed_cpu_ms = cpu;
        std::int64_t mem = proc_peak_kib(pid);
        if (mem > observed_peak_kib) observed_peak_kib = mem;

        if (observed_cpu_ms >= spec.limits.time_limit_ms) kill_group("cpu-limit");
        if (wall_elapsed_ms() >= wall_limit_ms) kill_group("wall-limit");
    }

    outcome.wall_ms = wall_elapsed_ms();

    // Drain whatever is still buffered. Write ends may be inherited by
    // grandchildren, so give up after a short grace period.
    auto drain_deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(200);
    while ((!out_sink.eof || !err_sink.eof) &&
           std::chrono::steady_clock::now() < drain_deadline) {
        pollfd fds[2] = {{out_pipe.read_fd, POLLIN, 0}, {err_pipe.read_fd, POLLIN, 0}};
        poll(fds, 2, 10);
        bool a = out_sink.drain();
        bool b = err_sink.drain();
        if (!a && !b) break;
    }
    if (stdout_fd != -1) close(stdout_fd);
    if (stderr_fd != -1) close(stderr_fd);
    kill(-pid, SIGKILL); // reap any stragglers in the group

    if (spawn_errno != 0) {
        fs::remove_all(run_dir);
        throw SpawnFailure("cannot execute '" + spec.command[0] +
                           "': " + std::strerror(spawn_errno));
    }
    if (WIFEXITED(wait_status) && WEXITSTATUS(wait_status) == 127 && out_sink.total == 0 &&
        outcome.stderr_excerpt.empty() && err_sink.total == 0) {
        // exec failure race: status byte may be lost if the pipe broke
        fs::remove_all(run_dir);
        throw SpawnFailure("cannot execute '" + spec.command[0] + "'");
    }

    const std::int64_t rusage_cpu_ms =
        (usage.ru_utime.tv_sec + usage.ru_stime.tv_sec) * 1000 +
        (usage.ru_utime.tv_usec + usage.ru_stime.tv_usec) / 1000;
    outcome.cpu_ms = std::max(rusage_cpu_ms, observed_cpu_ms);

    std::int64_t peak_kib = std::max<std::int64_t>(observed_peak_kib, usage.ru_maxrss);
    outcome.peak_mem_mib = (peak_kib + 1023) / 1024;

    if (WIFEXITED(wait_status)) {
        outcome.exit_status.kind = ExitStatus::Kind::exited;
        outcome.exit_status.code = WEXITSTATUS(wait_status);
    } else if (WIFSIGNALED(wait_status)) {
        int sig = WTERMSIG(wait_status);
        outcome.exit_status.kind = ExitStatus::Kind::killed;
        outcome.exit_status.code = sig;
        outcome.exit_status.cause = kill_cause.empty() ? signal_name(sig) : kill_cause;
        if (sig == SIGXCPU && kill_cause.empty()) kill_cause = "cpu-limit";
    }

    if (!kill_cause.empty() || outcome.cpu_ms >= spec.limits.time_limit_ms) {
        if (kill_cause == "cpu-limit" || kill_cause == "wall-limit" ||
            outcome.cpu_ms >= spec.limits.time_limit_ms)
            outcome.flags.insert(RunFlag::time_exceeded);
    }

    const bool abnormal = !(WIFEXITED(wait_status) && WEXITSTATUS(wait_status) == 0);
    const std::int64_t mem_threshold_mib = spec.limits.memory_limit_mib - kMemSlackMiB;
    if (abnormal && !outcome.has(RunFlag::time_exceeded) &&
        outcome.peak_mem_mib >= mem_threshold_mib) {
        outcome.flags.insert(RunFlag::memory_exceeded);
        // The failed request asked for at least the cap.
        outcome.peak_mem_mib = std::max(outcome.peak_mem_mib, spec.limits.memory_limit_mib);
    }

    if (out_sink.total > spec.limits.output_limit_bytes)
        outcome.flags.insert(RunFlag::output_truncated);

    return outcome;
}

std::string slurp_stdout(const RunOutcome& outcome) { return read_file(outcome.stdout_path); }

void discard_run(const RunOutcome& outcome) {
    std::error_code ec;
    fs::remove_all(outcome.run_dir, ec);
}

} // namespace tcforge
