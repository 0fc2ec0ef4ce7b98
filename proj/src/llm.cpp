#include "tcforge/llm.hpp"

#include "tcforge/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace tcforge {

using nlohmann::json;

std::string exchange_cache_key(const std::string& model_id, const std::string& prompt) {
    std::string keyed = model_id;
    keyed.push_back('\0');
    keyed += prompt;
    return sha256_hex(keyed);
}

namespace {

class HttpChatTransport : public ChatTransport {
public:
    explicit HttpChatTransport(HttpTransportOptions options) : options_(std::move(options)) {}

    TransportReply complete(const std::string& model_id, const std::string& prompt) override {
        httplib::Client client(options_.base_url);
        client.set_connection_timeout(options_.timeout_seconds, 0);
        client.set_read_timeout(options_.timeout_seconds, 0);

        httplib::Headers headers;
        if (!options_.api_key_env.empty()) {
            const char* key = std::getenv(options_.api_key_env.c_str());
            if (!key || !*key)
                throw ConfigError("environment variable " + options_.api_key_env + " is not set");
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        json body = {
            {"model", model_id},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
        };
        auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
        if (!res) throw LlmTimeout("chat completion request failed: " + to_string(res.error()));
        if (res->status != 200) throw ProviderError(res->status, res->body);

        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty())
            throw ProviderError(res->status, "malformed completion response");

        TransportReply out;
        out.response = reply["choices"][0]["message"]["content"].get<std::string>();
        if (reply.contains("usage")) {
            const auto& usage = reply["usage"];
            if (usage.contains("prompt_tokens"))
                out.input_tokens = usage["prompt_tokens"].get<std::int64_t>();
            if (usage.contains("completion_tokens"))
                out.output_tokens = usage["completion_tokens"].get<std::int64_t>();
        }
        return out;
    }

private:
    HttpTransportOptions options_;
};

std::int64_t estimate_tokens(const std::string& text) {
    return static_cast<std::int64_t>((text.size() + 3) / 4);
}

} // namespace

std::unique_ptr<ChatTransport> make_http_transport(HttpTransportOptions options) {
    return std::make_unique<HttpChatTransport>(std::move(options));
}

LlmMode llm_mode_from_string(const std::string& s) {
    if (s == "live") return LlmMode::live;
    if (s == "record") return LlmMode::record;
    if (s == "replay") return LlmMode::replay;
    throw ConfigError("unknown llm mode: " + s);
}

LlmClient::LlmClient(fs::path cache_dir, std::unique_ptr<ChatTransport> transport)
    : cache_dir_(std::move(cache_dir)), transport_(std::move(transport)) {}

ChatExchange LlmClient::complete(const std::string& model_id, const std::string& prompt,
                                 LlmMode mode) {
    const std::string key = exchange_cache_key(model_id, prompt);
    if (mode == LlmMode::replay) {
        auto cached = cache_read(key);
        if (!cached) throw CacheMiss(key);
        return *cached;
    }
    ChatExchange exchange = live_call(model_id, prompt);
    if (mode == LlmMode::record) cache_write(key, exchange);
    return exchange;
}

ChatExchange LlmClient::live_call(const std::string& model_id, const std::string& prompt) {
    if (!transport_) throw ConfigError("no transport configured for live LLM calls");
    TransportReply reply = transport_->complete(model_id, prompt);

    ChatExchange exchange;
    exchange.model_id = model_id;
    exchange.prompt = prompt;
    exchange.response = reply.response;
    exchange.timestamp = iso8601_utc_now();
    if (reply.input_tokens && reply.output_tokens) {
        exchange.input_tokens = *reply.input_tokens;
        exchange.output_tokens = *reply.output_tokens;
    } else {
        exchange.input_tokens = estimate_tokens(prompt);
        exchange.output_tokens = estimate_tokens(reply.response);
        exchange.usage_estimated = true;
    }
    return exchange;
}

std::optional<ChatExchange> LlmClient::cache_read(const std::string& key) const {
    fs::path file = cache_dir_ / (key + ".json");
    if (!fs::exists(file)) return std::nullopt;
    json doc = json::parse(read_file(file));
    ChatExchange exchange;
    exchange.model_id = doc.at("model_id").get<std::string>();
    exchange.prompt = doc.at("prompt").get<std::string>();
    exchange.response = doc.at("response").get<std::string>();
    exchange.input_tokens = doc.at("input_tokens").get<std::int64_t>();
    exchange.output_tokens = doc.at("output_tokens").get<std::int64_t>();
    exchange.timestamp = doc.at("timestamp").get<std::string>();
    exchange.usage_estimated = doc.value("usage_estimated", false);
    return exchange;
}

void LlmClient::cache_write(const std::string& key, const ChatExchange& exchange) const {
    std::lock_guard lock(write_mutex_);
    json doc = {
        {"model_id", exchange.model_id},
        {"prompt", exchange.prompt},
        {"response", exchange.response},
        {"input_tokens", exchange.input_tokens},
        {"output_tokens", exchange.output_tokens},
        {"timestamp", exchange.timestamp},
        {"usage_estimated", exchange.usage_estimated},
    };
    write_file(cache_dir_ / (key + ".json"), doc.dump(2) + "\n");
}

std::string format_usd(MicroUsd amount) {
    char buf[48];
    const char* sign = amount < 0 ? "-" : "";
    std::uint64_t abs = amount < 0 ? static_cast<std::uint64_t>(-amount)
                                   : static_cast<std::uint64_t>(amount);
    std::snprintf(buf, sizeof(buf), "%s%llu.%06llu", sign,
                  static_cast<unsigned long long>(abs / 1000000),
                  static_cast<unsigned long long>(abs % 1000000));
    return buf;
}

PriceTable load_price_table(const fs::path& path) {
    json doc = json::parse(read_file(path));
    PriceTable table;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        PriceTable::Price price;
        price.input_per_mtok = it.value().at("input").get<double>();
        price.output_per_mtok = it.value().at("output").get<double>();
        if (price.input_per_mtok < 0 || price.output_per_mtok < 0)
            throw ConfigError("negative price for model " + it.key());
        table.models[it.key()] = price;
    }
    return table;
}

MicroUsd cost_of(const ChatExchange& exchange, const PriceTable& prices) {
    auto it = prices.models.find(exchange.model_id);
    if (it == prices.models.end()) throw UnknownModel(exchange.model_id);
    // USD/1e6-tokens times token counts is already in micro-USD; nearbyint
    // under the default FP mode rounds half to even.
    long double micro = static_cast<long double>(exchange.input_tokens) * it->second.input_per_mtok +
                        static_cast<long double>(exchange.output_tokens) * it->second.output_per_mtok;
    return static_cast<MicroUsd>(std::llrintl(std::nearbyintl(micro)));
}

void CostLedger::add(const ChatExchange& exchange, const PriceTable& prices) {
    Entry entry;
    entry.exchange_key = exchange_cache_key(exchange.model_id, exchange.prompt);
    entry.model_id = exchange.model_id;
    entry.cost = cost_of(exchange, prices);
    entry.usage_estimated = exchange.usage_estimated;
    entries_.push_back(std::move(entry));
}

void CostLedger::add_entry(Entry entry) { entries_.push_back(std::move(entry)); }

MicroUsd CostLedger::total() const {
    MicroUsd total = 0;
    for (const auto& e : entries_) total += e.cost;
    return total;
}

CostLedger CostLedger::load(const fs::path& path) {
    CostLedger ledger;
    if (!fs::exists(path)) return ledger;
    for (const auto& line : split_lines(read_file(path))) {
        if (trim(line).empty()) continue;
        json doc = json::parse(line);
        Entry entry;
        entry.exchange_key = doc.at("exchange").get<std::string>();
        entry.model_id = doc.at("model").get<std::string>();
        entry.cost = doc.at("cost_micro_usd").get<std::int64_t>();
        entry.usage_estimated = doc.value("usage_estimated", false);
        ledger.entries_.push_back(std::move(entry));
    }
    return ledger;
}

void CostLedger::append_to(const fs::path& path, const Entry& entry) const {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    json doc = {
        {"exchange", entry.exchange_key},
        {"model", entry.model_id},
        {"cost_micro_usd", entry.cost},
        {"cost_usd", format_usd(entry.cost)},
        {"usage_estimated", entry.usage_estimated},
    };
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorFamily::internal, "cannot append to " + path.string());
    out << doc.dump() << '\n';
}

} // namespace tcforge
