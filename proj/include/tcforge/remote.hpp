#pragma once

#include "tcforge/core.hpp"
#include "tcforge/exchange.hpp"
#include "tcforge/util.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace tcforge {

/// A judge-platform endpoint. The auth token lives only in the named
/// environment variable; it is read per request and never stored, logged,
/// or serialized.
struct RemoteEndpoint {
    std::string base_url;
    std::string token_env = "TCFORGE_REMOTE_TOKEN";
    std::map<std::string, int> problem_ids; // local slug -> remote numeric id
};

struct SubmissionFilter {
    bool accepted_only = false;
};

struct RetryPolicy {
    int attempts = 3;
    int base_backoff_ms = 100; // doubled per retry
};

using LogSink = std::function<void(const std::string&)>;

/// JSON-over-HTTP client for the judge API described in docs/remote_api.md.
/// Connection failures and 5xx responses retry with exponential backoff.
class RemoteClient {
public:
    RemoteClient(RemoteEndpoint endpoint, RetryPolicy retry = {}, LogSink log = {});

    Problem fetch_problem(int remote_id);
    std::vector<Submission> fetch_submissions(int remote_id, const SubmissionFilter& filter = {});
    /// Uploads a flat_zip archive; returns the manifest the server computed
    /// from the stored payload.
    Manifest upload_tests(int remote_id, const std::string& zip_bytes);
    std::string request_rejudge(int remote_id, const std::vector<std::string>& submission_ids);

    const RemoteEndpoint& endpoint() const { return endpoint_; }

private:
    struct Reply {
        int status = 0;
        std::string body;
    };
    Reply request(const std::string& method, const std::string& path, const std::string& body,
                  const std::string& content_type);
    std::string auth_token() const;
    void log(const std::string& line) const;

    RemoteEndpoint endpoint_;
    RetryPolicy retry_;
    LogSink log_;
};

} // namespace tcforge
