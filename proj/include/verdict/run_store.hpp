#pragma once
// Append-only JSON-lines store of RunRecords, keyed by run_key.

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "verdict/prompting.hpp"
#include "verdict/votes.hpp"

namespace verdict {

struct StoreFilter {
    std::optional<PromptType> prompt_type;
    std::optional<double> temperature;
    std::optional<std::string> model_name;
};

// Writes are serialized internally; reads are safe alongside writes.
class RunStore {
public:
    // Loads an existing store; a missing file is an empty store.
    explicit RunStore(std::string path);

    // Idempotent on identical key+content (created_at excluded from the
    // comparison); raises KeyCollision when the key exists with different
    // content. Returns true when the record was appended.
    bool put(const RunRecord& record);

    std::optional<RunRecord> get(const std::string& run_key) const;
    bool contains(const std::string& run_key) const;

    // Matching records sorted by (example_id, prompt_type, temperature,
    // run_index, model_name).
    std::vector<RunRecord> list(const StoreFilter& filter = {}) const;

    std::size_t size() const;
    const std::string& path() const { return path_; }

    static std::string to_json_line(const RunRecord& record);
    static RunRecord from_json_line(const std::string& line);

private:
    std::string path_;
    std::vector<RunRecord> records_;
    std::unordered_map<std::string, std::size_t> index_;
    mutable std::mutex mutex_;
};

}  // namespace verdict
