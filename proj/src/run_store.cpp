#include "verdict/run_store.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include <json.hpp>

#include "verdict/errors.hpp"

namespace verdict {

using nlohmann::json;

std::string RunStore::to_json_line(const RunRecord& r) {
    json obj;
    obj["run_key"] = r.run_key;
    obj["example_id"] = r.example_id;
    obj["prompt_type"] = r.prompt_type;
    obj["temperature"] = r.temperature;
    obj["run_index"] = r.run_index;
    obj["model_name"] = r.model_name;
    obj["raw_response"] = r.raw_response;
    obj["parsed_vote"] = vote_value(r.parsed_vote);
    obj["created_at"] = r.created_at;
    return obj.dump();
}

RunRecord RunStore::from_json_line(const std::string& line) {
    RunRecord r;
    try {
        const json obj = json::parse(line);
        r.run_key = obj.at("run_key").get<std::string>();
        r.example_id = obj.at("example_id").get<std::string>();
        r.prompt_type = obj.at("prompt_type").get<std::string>();
        r.temperature = obj.at("temperature").get<double>();
        r.run_index = obj.at("run_index").get<int>();
        r.model_name = obj.at("model_name").get<std::string>();
        r.raw_response = obj.at("raw_response").get<std::string>();
        r.parsed_vote = vote_from_value(obj.at("parsed_vote").get<int>());
        r.created_at = obj.at("created_at").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseFailure(std::string("bad run record: ") + e.what());
    }
    if (r.run_key.empty()) throw ParseFailure("run record with empty run_key");
    return r;
}

RunStore::RunStore(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;  // missing file = empty store
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        RunRecord rec;
        try {
            rec = from_json_line(line);
        } catch (const ParseFailure& e) {
            throw ParseFailure(path_ + ":" + std::to_string(line_no) + ": " + e.what());
        }
        auto [it, inserted] = index_.try_emplace(rec.run_key, records_.size());
        if (!inserted) {
            if (!records_[it->second].same_content(rec)) {
                throw KeyCollision(path_ + ":" + std::to_string(line_no) + ": key '" + rec.run_key +
                                   "' already stored with different content");
            }
            continue;  // exact duplicate line, ignore
        }
        records_.push_back(std::move(rec));
    }
}

bool RunStore::put(const RunRecord& record) {
    if (record.run_key.empty()) throw InvalidArgument("run record with empty run_key");
    std::lock_guard lock(mutex_);
    auto it = index_.find(record.run_key);
    if (it != index_.end()) {
        if (records_[it->second].same_content(record)) return false;
        throw KeyCollision("key '" + record.run_key + "' already stored with different content");
    }
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IoError("cannot append to store '" + path_ + "'");
    out << to_json_line(record) << "\n";
    out.flush();
    if (!out) throw IoError("append to store '" + path_ + "' failed");
    index_.emplace(record.run_key, records_.size());
    records_.push_back(record);
    return true;
}

std::optional<RunRecord> RunStore::get(const std::string& run_key) const {
    std::lock_guard lock(mutex_);
    auto it = index_.find(run_key);
    if (it == index_.end()) return std::nullopt;
    return records_[it->second];
}

bool RunStore::contains(const std::string& run_key) const {
    std::lock_guard lock(mutex_);
    return index_.count(run_key) > 0;
}

std::vector<RunRecord> RunStore::list(const StoreFilter& filter) const {
    std::vector<RunRecord> out;
    {
        std::lock_guard lock(mutex_);
        for (const auto& rec : records_) {
            if (filter.prompt_type && rec.prompt_type != prompt_type_name(*filter.prompt_type)) continue;
            if (filter.temperature && rec.temperature != *filter.temperature) continue;
            if (filter.model_name && rec.model_name != *filter.model_name) continue;
            out.push_back(rec);
        }
    }
    std::sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.example_id, a.prompt_type, a.temperature, a.run_index, a.model_name) <
               std::tie(b.example_id, b.prompt_type, b.temperature, b.run_index, b.model_name);
    });
    return out;
}

std::size_t RunStore::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

}  // namespace verdict
