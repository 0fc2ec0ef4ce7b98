#pragma once

#include "tcforge/util.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace tcforge {

struct ChatExchange {
    std::string model_id;
    std::string prompt;
    std::string response;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::string timestamp;        // ISO 8601 UTC
    bool usage_estimated = false; // provider gave no usage metadata
};

/// Content-addressed key for the replay cache.
std::string exchange_cache_key(const std::string& model_id, const std::string& prompt);

struct TransportReply {
    std::string response;
    std::optional<std::int64_t> input_tokens;
    std::optional<std::int64_t> output_tokens;
};

/// One blocking chat-completion round trip. The HTTP implementation lives in
/// llm.cpp; tests inject stubs.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual TransportReply complete(const std::string& model_id, const std::string& prompt) = 0;
};

struct HttpTransportOptions {
    std::string base_url;    // e.g. https://api.openai.com
    std::string api_key_env; // env var holding the bearer token
    int timeout_seconds = 120;
};

std::unique_ptr<ChatTransport> make_http_transport(HttpTransportOptions options);

enum class LlmMode { live, record, replay };

LlmMode llm_mode_from_string(const std::string& s);

/// Caching chat client. Replay never touches the transport (it may be null);
/// record performs the live call and persists the transcript.
class LlmClient {
public:
    LlmClient(fs::path cache_dir, std::unique_ptr<ChatTransport> transport);

    ChatExchange complete(const std::string& model_id, const std::string& prompt, LlmMode mode);

    const fs::path& cache_dir() const { return cache_dir_; }

private:
    ChatExchange live_call(const std::string& model_id, const std::string& prompt);
    std::optional<ChatExchange> cache_read(const std::string& key) const;
    void cache_write(const std::string& key, const ChatExchange& exchange) const;

    fs::path cache_dir_;
    std::unique_ptr<ChatTransport> transport_;
    mutable std::mutex write_mutex_;
};

/// USD amounts are held in integer micro-dollars so ledger totals are exact
/// and permutation-invariant.
using MicroUsd = std::int64_t;

std::string format_usd(MicroUsd amount); // "1.000000"

struct PriceTable {
    struct Price {
        double input_per_mtok = 0.0;  // USD per 1,000,000 input tokens
        double output_per_mtok = 0.0; // USD per 1,000,000 output tokens
    };
    std::map<std::string, Price> models;
};

PriceTable load_price_table(const fs::path& path);

/// input*in_price/1e6 + output*out_price/1e6, rounded half-even to 6 decimals.
/// Throws UnknownModel when the exchange's model has no price entry.
MicroUsd cost_of(const ChatExchange& exchange, const PriceTable& prices);

class CostLedger {
public:
    struct Entry {
        std::string exchange_key;
        std::string model_id;
        MicroUsd cost = 0;
        bool usage_estimated = false;
    };

    void add(const ChatExchange& exchange, const PriceTable& prices);
    void add_entry(Entry entry);

    MicroUsd total() const;
    const std::vector<Entry>& entries() const { return entries_; }

    /// JSON-lines persistence; append is a single O_APPEND write.
    static CostLedger load(const fs::path& path);
    void append_to(const fs::path& path, const Entry& entry) const;

private:
    std::vector<Entry> entries_;
};

} // namespace tcforge
