#pragma once

#include "tcforge/core.hpp"
#include "tcforge/exchange.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace tcforge {

/// In-process stand-in for a judge platform, implementing the API contract
/// from docs/remote_api.md. Seed it with problems and submissions, start it
/// on an ephemeral port, and point a RemoteClient at it.
class MockJudgeServer {
public:
    struct SeededSubmission {
        Submission submission;
        bool full_pass = false; // drives the "accepted" filter
    };

    explicit MockJudgeServer(std::string expected_token);
    ~MockJudgeServer();

    MockJudgeServer(const MockJudgeServer&) = delete;
    MockJudgeServer& operator=(const MockJudgeServer&) = delete;

    void seed_problem(int remote_id, Problem problem, std::vector<SeededSubmission> submissions);

    /// Fail the next `n` requests with HTTP 503 (for retry tests).
    void fail_next_requests(int n);

    /// Binds 127.0.0.1 on an ephemeral port and serves on a background
    /// thread. Returns the base URL.
    std::string start();
    void stop();

    /// Manifest the server computed from the most recent test upload.
    Manifest uploaded_manifest(int remote_id) const;
    std::vector<std::string> rejudge_log() const;

private:
    struct Entry {
        Problem problem;
        std::vector<SeededSubmission> submissions;
        Manifest uploaded;
    };

    std::string expected_token_;
    mutable std::mutex mutex_;
    std::map<int, Entry> entries_;
    std::vector<std::string> rejudge_log_;
    int fail_requests_ = 0;

    std::unique_ptr<httplib::Server> server_;
    std::thread serve_thread_;
    int port_ = 0;
};

} // namespace tcforge
