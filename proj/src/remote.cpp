#include "tcforge/remote.hpp"

#include "tcforge/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

namespace tcforge {

using nlohmann::json;

RemoteClient::RemoteClient(RemoteEndpoint endpoint, RetryPolicy retry, LogSink log)
    : endpoint_(std::move(endpoint)), retry_(retry), log_(std::move(log)) {
    if (endpoint_.base_url.empty() || endpoint_.base_url.find("://") == std::string::npos)
        throw ConfigError("remote base_url must be an absolute http(s) URL");
}

std::string RemoteClient::auth_token() const {
    const char* token = std::getenv(endpoint_.token_env.c_str());
    if (!token || !*token)
        throw AuthFailure("environment variable " + endpoint_.token_env + " is not set");
    return token;
}

void RemoteClient::log(const std::string& line) const {
    if (log_) log_(line);
}

RemoteClient::Reply RemoteClient::request(const std::string& method, const std::string& path,
                                          const std::string& body,
                                          const std::string& content_type) {
    const std::string token = auth_token();
    int backoff_ms = retry_.base_backoff_ms;
    std::string last_error = "no attempts made";

    for (int attempt = 1; attempt <= retry_.attempts; attempt++) {
        httplib::Client client(endpoint_.base_url);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(30, 0);
        httplib::Headers headers{{"Authorization", "Bearer " + token}};

        httplib::Result res = method == "GET" ? client.Get(path, headers)
                                              : client.Post(path, headers, body, content_type);
        if (res) {
            log(method + " " + path + " -> " + std::to_string(res->status));
            if (res->status == 401 || res->status == 403)
                throw AuthFailure("remote rejected credentials (HTTP " +
                                  std::to_string(res->status) + ")");
            if (res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
            } else if (res->status >= 400) {
                throw RemoteError(res->status, res->body);
            } else {
                return {res->status, res->body};
            }
        } else {
            last_error = to_string(res.error());
            log(method + " " + path + " -> transport error: " + last_error);
        }

        if (attempt < retry_.attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
    }
    throw RemoteTimeout(method + " " + path + " failed after " + std::to_string(retry_.attempts) +
                        " attempts: " + last_error);
}

Problem RemoteClient::fetch_problem(int remote_id) {
    Reply reply = request("GET", "/problems/" + std::to_string(remote_id), "", "");
    json doc = json::parse(reply.body);

    Problem problem;
    problem.id = doc.at("slug").get<std::string>();
    problem.statement_markdown = doc.at("statement_markdown").get<std::string>();
    problem.limits.time_limit_ms = doc.at("time_limit_ms").get<std::int64_t>();
    problem.limits.memory_limit_mib = doc.at("memory_limit_mib").get<std::int64_t>();
    problem.limits.output_limit_bytes =
        doc.value("output_limit_bytes", problem.limits.output_limit_bytes);
    for (const auto& tag : doc.value("tags", json::array()))
        problem.tags.push_back(tag.get<std::string>());
    validate(problem);
    return problem;
}

std::vector<Submission> RemoteClient::fetch_submissions(int remote_id,
                                                        const SubmissionFilter& filter) {
    std::string path = "/problems/" + std::to_string(remote_id) + "/submissions";
    if (filter.accepted_only) path += "?filter=accepted";
    Reply reply = request("GET", path, "", "");
    json doc = json::parse(reply.body);

    std::vector<Submission> out;
    for (const auto& s : doc.at("submissions")) {
        Submission sub;
        sub.id = s.at("id").get<std::string>();
        sub.source_text = s.at("source").get<std::string>();
        sub.toolchain_id = s.value("toolchain_id", "cpp17");
        sub.origin = origin_from_string(s.value("origin", "contest"));
        out.push_back(std::move(sub));
    }
    return out;
}

Manifest RemoteClient::upload_tests(int remote_id, const std::string& zip_bytes) {
    Reply reply = request("POST", "/problems/" + std::to_string(remote_id) + "/tests", zip_bytes,
                          "application/zip");
    json doc = json::parse(reply.body);
    return manifest_from_json(doc.at("manifest"));
}

std::string RemoteClient::request_rejudge(int remote_id,
                                          const std::vector<std::string>& submission_ids) {
    json body = {{"problem_id", remote_id}, {"submission_ids", submission_ids}};
    Reply reply = request("POST", "/rejudge", body.dump(), "application/json");
    json doc = json::parse(reply.body);
    return doc.at("job_id").get<std::string>();
}

} // namespace tcforge
