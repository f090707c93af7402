#include "verdict/io.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "verdict/errors.hpp"
#include "verdict/hash.hpp"

namespace verdict {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string file_fingerprint(const std::string& path) {
    return fnv1a_hex(read_file(path));
}

std::vector<EntailmentExample> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset '" + path + "'");

    std::vector<EntailmentExample> out;
    std::map<std::string, int> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseFailure(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        EntailmentExample ex;
        try {
            ex.id = obj.at("id").get<std::string>();
            ex.query = obj.at("query").get<std::string>();
            ex.articles = obj.at("articles").get<std::vector<std::string>>();
            if (obj.contains("label") && !obj["label"].is_null()) {
                const auto label = obj["label"].get<std::string>();
                if (label == "Y") {
                    ex.gold = Vote::yes;
                } else if (label == "N") {
                    ex.gold = Vote::no;
                } else {
                    throw ParseFailure("label must be \"Y\", \"N\" or null, got \"" + label + "\"");
                }
            }
        } catch (const json::exception& e) {
            throw ParseFailure(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        try {
            ex.validate();
        } catch (const InvalidArgument& e) {
            throw ParseFailure(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (++seen[ex.id] > 1) {
            throw ParseFailure(path + ":" + std::to_string(line_no) + ": duplicate id '" + ex.id + "'");
        }
        out.push_back(std::move(ex));
    }
    return out;
}

void save_dataset(const std::vector<EntailmentExample>& examples, const std::string& path) {
    std::ostringstream buf;
    for (const auto& ex : examples) {
        json obj;
        obj["id"] = ex.id;
        obj["query"] = ex.query;
        obj["articles"] = ex.articles;
        if (ex.gold) {
            obj["label"] = (*ex.gold == Vote::yes) ? "Y" : "N";
        } else {
            obj["label"] = nullptr;
        }
        buf << obj.dump() << "\n";
    }
    write_file(path, buf.str());
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

void save_votes_csv(const VoteMatrix& matrix, const std::string& path) {
    std::ostringstream buf;
    buf << "item_id,source_id,vote\n";
    for (std::size_t i = 0; i < matrix.item_count(); ++i) {
        for (std::size_t s = 0; s < matrix.source_count(); ++s) {
            buf << csv_escape(matrix.item_ids()[i]) << "," << csv_escape(matrix.source_ids()[s])
                << "," << vote_value(matrix.at(i, s)) << "\n";
        }
    }
    write_file(path, buf.str());
}

VoteMatrix load_votes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open votes file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || csv_split(line) != std::vector<std::string>{"item_id", "source_id", "vote"}) {
        throw ParseFailure(path + ": expected header item_id,source_id,vote");
    }

    // Preserve first-appearance order so a save/load round trip is stable.
    std::vector<std::string> item_ids, source_ids;
    std::map<std::string, std::size_t> item_pos, source_pos;
    struct Entry {
        std::size_t item, source;
        Vote vote;
    };
    std::vector<Entry> entries;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = csv_split(line);
        if (fields.size() != 3) {
            throw ParseFailure(path + ":" + std::to_string(line_no) + ": expected 3 fields");
        }
        Vote v;
        try {
            v = vote_from_value(std::stoi(fields[2]));
        } catch (const std::exception&) {
            throw ParseFailure(path + ":" + std::to_string(line_no) + ": bad vote '" + fields[2] + "'");
        }
        auto [it_i, new_i] = item_pos.try_emplace(fields[0], item_ids.size());
        if (new_i) item_ids.push_back(fields[0]);
        auto [it_s, new_s] = source_pos.try_emplace(fields[1], source_ids.size());
        if (new_s) source_ids.push_back(fields[1]);
        entries.push_back({it_i->second, it_s->second, v});
    }
    if (entries.empty()) throw EmptyInput(path + ": no vote rows");

    std::vector<Vote> cells(item_ids.size() * source_ids.size(), Vote::abstain);
    for (const auto& e : entries) cells[e.item * source_ids.size() + e.source] = e.vote;
    return VoteMatrix(std::move(item_ids), std::move(source_ids), std::move(cells));
}

namespace {

std::string fixed6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

}  // namespace

void save_posteriors_csv(const PosteriorLabels& posteriors, const std::string& path) {
    if (posteriors.item_ids.size() != posteriors.p.size()) {
        throw InvalidArgument("posterior ids and probabilities have different lengths");
    }
    const auto hard = harden_votes(posteriors);
    std::ostringstream buf;
    buf << "item_id,p_positive,hard_label\n";
    for (std::size_t i = 0; i < posteriors.p.size(); ++i) {
        buf << csv_escape(posteriors.item_ids[i]) << "," << fixed6(posteriors.p[i]) << ","
            << vote_value(hard[i]) << "\n";
    }
    write_file(path, buf.str());
}

void save_source_params_csv(const SourceParams& params, const std::string& path) {
    std::ostringstream buf;
    buf << "source_id,correlation,symmetric_accuracy,class_balance\n";
    for (std::size_t s = 0; s < params.source_ids.size(); ++s) {
        buf << csv_escape(params.source_ids[s]) << "," << fixed6(params.correlation[s]) << ","
            << fixed6(params.symmetric_accuracy(s)) << "," << fixed6(params.class_balance) << "\n";
    }
    write_file(path, buf.str());
}

void save_confusion_params_csv(const ConfusionParams& params, const std::string& path) {
    std::ostringstream buf;
    buf << "source_id,sensitivity,specificity,prior\n";
    for (std::size_t s = 0; s < params.source_ids.size(); ++s) {
        buf << csv_escape(params.source_ids[s]) << "," << fixed6(params.sensitivity[s]) << ","
            << fixed6(params.specificity[s]) << "," << fixed6(params.prior) << "\n";
    }
    write_file(path, buf.str());
}

}  // namespace verdict
