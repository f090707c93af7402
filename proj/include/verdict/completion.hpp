#pragma once
// Chat-completions client with retry/backoff, plus the store-backed
// complete() used by sweeps. Replay mode never touches the network.

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "verdict/prompting.hpp"
#include "verdict/run_store.hpp"

namespace verdict {

struct RetryPolicy {
    int max_attempts = 5;
    int initial_backoff_ms = 1000;
    double multiplier = 2.0;
};

struct RunConfig {
    std::vector<double> temperatures;  // each in [0, 2]
    int runs_per_temperature = 10;
    PromptType prompt_type = PromptType::reason_then_answer;
    std::string model_name;
    int max_parallel_requests = 4;
    RetryPolicy retry;

    void validate() const;
};

// Transport abstraction so tests can count or fake network calls.
class Completer {
public:
    virtual ~Completer() = default;
    // One chat completion; throws TransportError after exhausting retries.
    virtual std::string complete_raw(const std::string& message, double temperature) = 0;
};

// POSTs {base_url}/v1/chat/completions with
// {"model", "temperature", "messages": [{"role": "user", "content"}]}
// and returns choices[0].message.content. Retries connection errors,
// 408/429 and 5xx with exponential backoff. Credential read from the
// VERDICT_API_KEY environment variable (sent as a bearer token when set).
class HttpCompleter : public Completer {
public:
    HttpCompleter(std::string base_url, std::string model_name, RetryPolicy retry = {});
    ~HttpCompleter() override;

    std::string complete_raw(const std::string& message, double temperature) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Identity of one completion within a sweep.
struct RunIdentity {
    std::string example_id;
    PromptType prompt_type;
    double temperature = 0.0;
    int run_index = 0;
    std::string model_name;
};

// Cache-or-fetch. Returns the stored record when run_key is already present
// (zero network activity); otherwise renders nothing itself — the caller
// passes the rendered message — issues one completion, parses the vote,
// persists the RunRecord and returns it. completer == nullptr means replay
// mode: a missing key raises CacheMiss naming the key.
RunRecord complete(const std::string& message,
                   const RunIdentity& identity,
                   RunStore& store,
                   Completer* completer);

// ISO-8601 UTC timestamp for freshly fetched records.
std::string now_utc_iso8601();

}  // namespace verdict
