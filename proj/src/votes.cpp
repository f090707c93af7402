#include "verdict/votes.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "verdict/errors.hpp"

namespace verdict {

Vote vote_from_value(int x) {
    switch (x) {
        case -1: return Vote::no;
        case 0: return Vote::abstain;
        case 1: return Vote::yes;
        default:
            throw InvalidArgument("vote value must be one of {-1, 0, 1}, got " + std::to_string(x));
    }
}

void EntailmentExample::validate() const {
    if (id.empty()) throw InvalidArgument("example id must be non-empty");
    if (articles.empty()) throw InvalidArgument("example '" + id + "' has no articles");
    if (gold && is_abstain(*gold)) throw InvalidArgument("example '" + id + "' has an abstain gold label");
}

LabelMap gold_labels(const std::vector<EntailmentExample>& examples) {
    LabelMap out;
    for (const auto& ex : examples) {
        if (ex.gold) out[ex.id] = *ex.gold;
    }
    return out;
}

long long percent_hundredths(long long num, long long den) {
    if (den <= 0) throw InvalidArgument("percent denominator must be positive");
    // round(num/den * 10000) half away from zero, in exact integer arithmetic
    const long long scaled = num * 10000;
    if (scaled >= 0) return (2 * scaled + den) / (2 * den);
    return -((2 * (-scaled) + den) / (2 * den));
}

std::string format_hundredths(long long hundredths) {
    const bool neg = hundredths < 0;
    const long long mag = neg ? -hundredths : hundredths;
    std::string s = std::to_string(mag / 100) + ".";
    const long long frac = mag % 100;
    if (frac < 10) s += "0";
    s += std::to_string(frac);
    return neg ? "-" + s : s;
}

long long EvaluationResult::accuracy_hundredths() const {
    if (total <= 0) throw InvalidArgument("evaluation over zero items");
    return percent_hundredths(correct, total);
}

std::string EvaluationResult::accuracy_str() const {
    return format_hundredths(accuracy_hundredths());
}

bool RunRecord::same_identity(const RunRecord& other) const {
    return example_id == other.example_id && prompt_type == other.prompt_type &&
           temperature == other.temperature && run_index == other.run_index &&
           model_name == other.model_name;
}

bool RunRecord::same_content(const RunRecord& other) const {
    return same_identity(other) && raw_response == other.raw_response &&
           parsed_vote == other.parsed_vote;
}

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (id.empty()) throw InvalidArgument(std::string(what) + " id must be non-empty");
        if (!seen.insert(id).second) throw InvalidArgument(std::string("duplicate ") + what + " id '" + id + "'");
    }
}

}  // namespace

VoteMatrix::VoteMatrix(std::vector<std::string> item_ids,
                       std::vector<std::string> source_ids,
                       std::vector<Vote> cells)
    : item_ids_(std::move(item_ids)), source_ids_(std::move(source_ids)), cells_(std::move(cells)) {
    if (item_ids_.empty()) throw InvalidArgument("vote matrix needs at least one item");
    if (source_ids_.empty()) throw InvalidArgument("vote matrix needs at least one source");
    require_unique(item_ids_, "item");
    require_unique(source_ids_, "source");
    if (cells_.size() != item_ids_.size() * source_ids_.size()) {
        throw InvalidArgument("vote grid has " + std::to_string(cells_.size()) + " cells, expected " +
                              std::to_string(item_ids_.size() * source_ids_.size()));
    }
    for (std::size_t i = 0; i < item_ids_.size(); ++i) item_index_[item_ids_[i]] = i;
    for (std::size_t s = 0; s < source_ids_.size(); ++s) source_index_[source_ids_[s]] = s;
}

Vote VoteMatrix::at(std::size_t item, std::size_t source) const {
    if (item >= item_count() || source >= source_count()) {
        throw InvalidArgument("vote matrix index out of range");
    }
    return cells_[item * source_count() + source];
}

std::size_t VoteMatrix::item_index(const std::string& id) const {
    auto it = item_index_.find(id);
    if (it == item_index_.end()) throw InvalidArgument("unknown item id '" + id + "'");
    return it->second;
}

std::size_t VoteMatrix::source_index(const std::string& id) const {
    auto it = source_index_.find(id);
    if (it == source_index_.end()) throw InvalidArgument("unknown source id '" + id + "'");
    return it->second;
}

VoteMatrix VoteMatrix::select_sources(const std::vector<std::size_t>& source_indices) const {
    std::vector<std::string> ids;
    ids.reserve(source_indices.size());
    for (std::size_t s : source_indices) {
        if (s >= source_count()) throw InvalidArgument("source index out of range");
        ids.push_back(source_ids_[s]);
    }
    std::vector<Vote> cells;
    cells.reserve(item_count() * source_indices.size());
    for (std::size_t i = 0; i < item_count(); ++i) {
        for (std::size_t s : source_indices) cells.push_back(at(i, s));
    }
    return VoteMatrix(item_ids_, std::move(ids), std::move(cells));
}

VoteMatrix VoteMatrix::negated() const {
    std::vector<Vote> cells;
    cells.reserve(cells_.size());
    for (Vote v : cells_) cells.push_back(vote_from_value(-vote_value(v)));
    return VoteMatrix(item_ids_, source_ids_, std::move(cells));
}

std::size_t VoteMatrix::non_abstain_count() const {
    std::size_t n = 0;
    for (Vote v : cells_) {
        if (!is_abstain(v)) ++n;
    }
    return n;
}

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

VoteMatrix build_matrix_impl(const std::vector<RunRecord>& records,
                             const SourceGrouping& grouping,
                             const std::vector<std::string>* item_order) {
    struct Cell {
        Vote vote;
        const RunRecord* origin;
    };
    std::vector<std::string> item_ids;
    std::vector<std::string> source_ids;
    std::map<std::pair<std::string, std::string>, Cell> cells;

    for (const auto& rec : records) {
        auto source = grouping(rec);
        if (!source) continue;
        if (rec.example_id.empty()) throw InvalidArgument("run record with empty example_id");
        auto key = std::make_pair(rec.example_id, *source);
        auto [it, inserted] = cells.try_emplace(key, Cell{rec.parsed_vote, &rec});
        if (!inserted && it->second.vote != rec.parsed_vote) {
            throw ConflictingRecords("conflicting votes for item '" + rec.example_id + "', source '" +
                                     *source + "': " + std::to_string(vote_value(it->second.vote)) +
                                     " vs " + std::to_string(vote_value(rec.parsed_vote)));
        }
        if (inserted) {
            item_ids.push_back(rec.example_id);
            source_ids.push_back(*source);
        }
    }
    if (cells.empty()) throw EmptyInput("no records matched the source grouping");

    source_ids = sorted_unique(std::move(source_ids));
    if (item_order) {
        item_ids = *item_order;
    } else {
        item_ids = sorted_unique(std::move(item_ids));
    }

    std::vector<Vote> grid(item_ids.size() * source_ids.size(), Vote::abstain);
    std::unordered_map<std::string, std::size_t> item_pos;
    for (std::size_t i = 0; i < item_ids.size(); ++i) item_pos[item_ids[i]] = i;
    std::unordered_map<std::string, std::size_t> source_pos;
    for (std::size_t s = 0; s < source_ids.size(); ++s) source_pos[source_ids[s]] = s;

    for (const auto& [key, cell] : cells) {
        auto it = item_pos.find(key.first);
        if (it == item_pos.end()) {
            throw InvalidArgument("record item '" + key.first + "' missing from the requested item order");
        }
        grid[it->second * source_ids.size() + source_pos.at(key.second)] = cell.vote;
    }
    return VoteMatrix(std::move(item_ids), std::move(source_ids), std::move(grid));
}

}  // namespace

VoteMatrix build_vote_matrix(const std::vector<RunRecord>& records, const SourceGrouping& grouping) {
    return build_matrix_impl(records, grouping, nullptr);
}

VoteMatrix build_vote_matrix(const std::vector<RunRecord>& records,
                             const SourceGrouping& grouping,
                             const std::vector<std::string>& item_order) {
    return build_matrix_impl(records, grouping, &item_order);
}

std::vector<VoteTriple> flatten(const VoteMatrix& matrix) {
    std::vector<VoteTriple> out;
    out.reserve(matrix.item_count() * matrix.source_count());
    for (std::size_t i = 0; i < matrix.item_count(); ++i) {
        for (std::size_t s = 0; s < matrix.source_count(); ++s) {
            out.push_back({matrix.item_ids()[i], matrix.source_ids()[s], matrix.at(i, s)});
        }
    }
    return out;
}

EvaluationResult accuracy(const LabelMap& predictions, const LabelMap& gold) {
    std::vector<std::string> only_pred;
    std::vector<std::string> only_gold;
    for (const auto& [id, v] : predictions) {
        if (!gold.count(id)) only_pred.push_back(id);
        (void)v;
    }
    for (const auto& [id, v] : gold) {
        if (is_abstain(v)) throw InvalidArgument("gold label for '" + id + "' is abstain");
        if (!predictions.count(id)) only_gold.push_back(id);
    }
    if (!only_pred.empty() || !only_gold.empty()) {
        std::ostringstream msg;
        msg << "prediction/gold item sets differ;";
        if (!only_pred.empty()) {
            msg << " only in predictions:";
            for (const auto& id : only_pred) msg << " " << id;
            msg << ";";
        }
        if (!only_gold.empty()) {
            msg << " only in gold:";
            for (const auto& id : only_gold) msg << " " << id;
        }
        throw KeyMismatch(msg.str());
    }

    EvaluationResult result;
    result.total = static_cast<long long>(gold.size());
    for (const auto& [id, g] : gold) {
        const Vote p = predictions.at(id);
        if (!is_abstain(p) && p == g) ++result.correct;
    }
    return result;
}

MatrixDiagnostics validate_matrix(const VoteMatrix& matrix) {
    MatrixDiagnostics diag;
    diag.item_count = matrix.item_count();
    diag.source_count = matrix.source_count();

    std::size_t abstains = 0;
    for (std::size_t s = 0; s < matrix.source_count(); ++s) {
        std::size_t pos = 0, neg = 0;
        for (std::size_t i = 0; i < matrix.item_count(); ++i) {
            switch (matrix.at(i, s)) {
                case Vote::yes: ++pos; break;
                case Vote::no: ++neg; break;
                case Vote::abstain: ++abstains; break;
            }
        }
        SourceDiagnostics src;
        src.source_id = matrix.source_ids()[s];
        src.coverage = static_cast<double>(pos + neg) / static_cast<double>(matrix.item_count());
        if (pos + neg > 0) {
            src.positive_share = static_cast<double>(pos) / static_cast<double>(pos + neg);
        }
        src.flagged = src.coverage < 0.5;
        diag.sources.push_back(std::move(src));
    }
    diag.abstain_rate =
        static_cast<double>(abstains) / static_cast<double>(matrix.item_count() * matrix.source_count());
    return diag;
}

}  // namespace verdict
