#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tcforge {

// Error families map 1:1 onto CLI exit codes (documented in --help).
enum class ErrorFamily {
    internal = 1,
    config = 2,
    llm = 3,
    sandbox = 4,
    forge = 5,
    judge = 6,
    archive = 7,
    remote = 8,
    network_forbidden = 9,
    bundle = 10,
    fixtures = 11,
};

const char* error_family_name(ErrorFamily f);

class Error : public std::runtime_error {
public:
    Error(ErrorFamily family, std::string message)
        : std::runtime_error(std::move(message)), family_(family) {}

    ErrorFamily family() const { return family_; }
    int exit_code() const { return static_cast<int>(family_); }

private:
    ErrorFamily family_;
};

struct ConfigError : Error {
    explicit ConfigError(std::string msg) : Error(ErrorFamily::config, std::move(msg)) {}
};

// --- prompt-kit ---

struct MissingSlot : Error {
    explicit MissingSlot(std::string slot)
        : Error(ErrorFamily::bundle, "missing prompt slot: {" + slot + "}"), slot(std::move(slot)) {}
    std::string slot;
};

struct BundleIncomplete : Error {
    explicit BundleIncomplete(std::vector<std::string> missing_parts)
        : Error(ErrorFamily::bundle, describe(missing_parts)), missing(std::move(missing_parts)) {}
    std::vector<std::string> missing;

private:
    static std::string describe(const std::vector<std::string>& parts);
};

struct BundleAmbiguous : Error {
    explicit BundleAmbiguous(std::string what)
        : Error(ErrorFamily::bundle, "ambiguous bundle: " + std::move(what)) {}
};

struct ParamCountMismatch : Error {
    ParamCountMismatch(int found_, int expected_)
        : Error(ErrorFamily::bundle,
                "param row count mismatch: found " + std::to_string(found_) + ", expected " +
                    std::to_string(expected_)),
          found(found_), expected(expected_) {}
    int found;
    int expected;
};

// --- llm-gate ---

struct CacheMiss : Error {
    explicit CacheMiss(std::string key)
        : Error(ErrorFamily::llm, "replay cache miss for key " + key), key(std::move(key)) {}
    std::string key;
};

struct ProviderError : Error {
    ProviderError(int status_, std::string body_)
        : Error(ErrorFamily::llm, "provider error, HTTP " + std::to_string(status_) + ": " + body_),
          status(status_), body(std::move(body_)) {}
    int status;
    std::string body;
};

struct LlmTimeout : Error {
    explicit LlmTimeout(std::string msg) : Error(ErrorFamily::llm, std::move(msg)) {}
};

struct UnknownModel : Error {
    explicit UnknownModel(std::string model)
        : Error(ErrorFamily::llm, "no price entry for model " + model), model(std::move(model)) {}
    std::string model;
};

struct NetworkForbidden : Error {
    explicit NetworkForbidden(std::string what)
        : Error(ErrorFamily::network_forbidden, "network forbidden in replay mode: " + std::move(what)) {}
};

// --- sandbox ---

struct SpawnFailure : Error {
    explicit SpawnFailure(std::string msg) : Error(ErrorFamily::sandbox, std::move(msg)) {}
};

struct SandboxUnavailable : Error {
    explicit SandboxUnavailable(std::string msg) : Error(ErrorFamily::sandbox, std::move(msg)) {}
};

// --- forge ---

struct CompileError : Error {
    explicit CompileError(std::string diagnostics_)
        : Error(ErrorFamily::forge, "compilation failed:\n" + diagnostics_),
          diagnostics(std::move(diagnostics_)) {}
    std::string diagnostics;
};

struct ForgeError : Error {
    ForgeError(std::string stage_, std::string msg)
        : Error(ErrorFamily::forge, "forge stage '" + stage_ + "': " + msg), stage(std::move(stage_)) {}
    std::string stage;
};

// --- judge ---

struct CheckerFailure : Error {
    explicit CheckerFailure(std::string msg) : Error(ErrorFamily::judge, std::move(msg)) {}
};

// --- diffeval ---

struct SubmissionSetMismatch : Error {
    explicit SubmissionSetMismatch(std::string msg) : Error(ErrorFamily::internal, std::move(msg)) {}
};

// --- exchange ---

struct IncompleteSuite : Error {
    explicit IncompleteSuite(std::string msg) : Error(ErrorFamily::archive, std::move(msg)) {}
};

struct UnrecognizedLayout : Error {
    explicit UnrecognizedLayout(std::string msg) : Error(ErrorFamily::archive, std::move(msg)) {}
};

struct OrphanFile : Error {
    explicit OrphanFile(std::string stem_)
        : Error(ErrorFamily::archive, "orphan test file with stem '" + stem_ + "'"), stem(std::move(stem_)) {}
    std::string stem;
};

struct AuthFailure : Error {
    explicit AuthFailure(std::string msg) : Error(ErrorFamily::remote, std::move(msg)) {}
};

struct RemoteError : Error {
    RemoteError(int status_, std::string msg)
        : Error(ErrorFamily::remote, "remote error, HTTP " + std::to_string(status_) + ": " + msg),
          status(status_) {}
    int status;
};

struct RemoteTimeout : Error {
    explicit RemoteTimeout(std::string msg) : Error(ErrorFamily::remote, std::move(msg)) {}
};

// --- fixtures ---

struct AnnotationViolated : Error {
    AnnotationViolated(std::string fixture_, std::string expectation_)
        : Error(ErrorFamily::fixtures, fixture_ + ": " + expectation_),
          fixture(std::move(fixture_)), expectation(std::move(expectation_)) {}
    std::string fixture;
    std::string expectation;
};

} // namespace tcforge
