#include "verdict/completion.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "verdict/errors.hpp"

namespace verdict {

namespace {

using nlohmann::json;

bool retryable_status(int status) {
    return status == 408 || status == 429 || (status >= 500 && status < 600);
}

// Splits "http://host:port/base" into client target and path prefix.
struct ParsedUrl {
    std::string origin;       // scheme://host[:port]
    std::string path_prefix;  // possibly empty, no trailing slash
};

ParsedUrl parse_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw InvalidArgument("base_url must start with http:// or https://: " + base_url);
    auto path_start = base_url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.origin = base_url;
    } else {
        out.origin = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
    }
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/')
        out.path_prefix.pop_back();
    return out;
}

}  // namespace

void RunConfig::validate() const {
    if (temperatures.empty()) throw InvalidArgument("RunConfig: temperatures must be non-empty");
    for (double t : temperatures)
        if (!(t >= 0.0 && t <= 2.0))
            throw InvalidArgument("RunConfig: temperature out of [0, 2]: " + std::to_string(t));
    if (runs_per_temperature < 1)
        throw InvalidArgument("RunConfig: runs_per_temperature must be >= 1");
    if (model_name.empty()) throw InvalidArgument("RunConfig: model_name must be non-empty");
    if (max_parallel_requests < 1)
        throw InvalidArgument("RunConfig: max_parallel_requests must be >= 1");
    if (retry.max_attempts < 1)
        throw InvalidArgument("RunConfig: retry.max_attempts must be >= 1");
    if (retry.initial_backoff_ms < 0)
        throw InvalidArgument("RunConfig: retry.initial_backoff_ms must be >= 0");
    if (retry.multiplier < 1.0)
        throw InvalidArgument("RunConfig: retry.multiplier must be >= 1");
}

struct HttpCompleter::Impl {
    ParsedUrl url;
    std::string model_name;
    RetryPolicy retry;
    std::string api_key;
    httplib::Client client;

    Impl(const std::string& base_url, std::string model, RetryPolicy policy)
        : url(parse_base_url(base_url)),
          model_name(std::move(model)),
          retry(policy),
          client(url.origin) {
        if (const char* key = std::getenv("VERDICT_API_KEY"); key != nullptr && *key != '\0') {
            api_key = key;
            client.set_bearer_token_auth(api_key);
        }
        client.set_connection_timeout(30, 0);
        client.set_read_timeout(120, 0);
    }
};

HttpCompleter::HttpCompleter(std::string base_url, std::string model_name, RetryPolicy retry)
    : impl_(std::make_unique<Impl>(base_url, std::move(model_name), retry)) {}

HttpCompleter::~HttpCompleter() = default;

std::string HttpCompleter::complete_raw(const std::string& message, double temperature) {
    json body = {
        {"model", impl_->model_name},
        {"temperature", temperature},
        {"messages", json::array({json{{"role", "user"}, {"content", message}}})},
    };
    const std::string payload = body.dump();
    const std::string path = impl_->url.path_prefix + "/v1/chat/completions";

    int backoff_ms = impl_->retry.initial_backoff_ms;
    std::string last_error;
    for (int attempt = 1; attempt <= impl_->retry.max_attempts; ++attempt) {
        if (attempt > 1) {
            if (backoff_ms > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms = static_cast<int>(backoff_ms * impl_->retry.multiplier);
        }
        auto res = impl_->client.Post(path, payload, "application/json");
        if (!res) {
            last_error = "connection error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            if (retryable_status(res->status)) continue;
            throw TransportError("completion request failed with non-retryable " + last_error +
                                 ": " + res->body);
        }
        try {
            json reply = json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw TransportError(std::string("malformed completion response: ") + e.what());
        }
    }
    throw TransportError("completion request failed after " +
                         std::to_string(impl_->retry.max_attempts) +
                         " attempts; last error: " + last_error);
}

std::string now_utc_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunRecord complete(const std::string& message,
                   const RunIdentity& identity,
                   RunStore& store,
                   Completer* completer) {
    const std::string prompt_name = prompt_type_name(identity.prompt_type);
    const std::string key = make_run_key(identity.model_name, identity.prompt_type,
                                         identity.temperature, identity.run_index,
                                         identity.example_id, message);
    if (auto cached = store.get(key)) return *cached;
    if (completer == nullptr)
        throw CacheMiss("no stored completion for run_key " + key + " (example " +
                        identity.example_id + ", " + prompt_name + ", t=" +
                        format_temperature(identity.temperature) + ", run " +
                        std::to_string(identity.run_index) + ") and replay mode forbids fetching");

    RunRecord record;
    record.run_key = key;
    record.example_id = identity.example_id;
    record.prompt_type = prompt_name;
    record.temperature = identity.temperature;
    record.run_index = identity.run_index;
    record.model_name = identity.model_name;
    record.raw_response = completer->complete_raw(message, identity.temperature);
    record.parsed_vote = parse_answer(record.raw_response, identity.prompt_type);
    record.created_at = now_utc_iso8601();
    store.put(record);
    return record;
}

}  // namespace verdict
