#pragma once
// Vote matrix data model, gold-label scoring arithmetic, and matrix diagnostics.
//
// All types here are immutable after construction and all free functions are
// pure, so everything is safe to use concurrently.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace verdict {

// A single binary vote. Abstain encodes "no parseable Yes/No answer".
enum class Vote : std::int8_t {
    no = -1,
    abstain = 0,
    yes = +1,
};

constexpr int vote_value(Vote v) { return static_cast<int>(v); }
constexpr bool is_abstain(Vote v) { return v == Vote::abstain; }

// Throws InvalidArgument unless x is one of {-1, 0, +1}.
Vote vote_from_value(int x);

// One query plus the statute articles it must be checked against.
struct EntailmentExample {
    std::string id;
    std::string query;
    std::vector<std::string> articles;
    std::optional<Vote> gold;  // +1 = entailed ("Yes"), -1 = not entailed; never abstain

    // Enforces: id non-empty, articles non-empty, gold (if set) not abstain.
    void validate() const;
};

// Hard labels keyed by item id.
using LabelMap = std::map<std::string, Vote>;

// Extracts the gold labels of the examples that have one.
LabelMap gold_labels(const std::vector<EntailmentExample>& examples);

// Count-based accuracy. All arithmetic on exact counts; rounding
// (half-away-from-zero to two decimals) happens only when formatting.
struct EvaluationResult {
    long long correct = 0;
    long long total = 0;

    // round(correct/total * 10000) as an integer number of hundredths of a percent.
    long long accuracy_hundredths() const;
    double accuracy_percent() const { return static_cast<double>(accuracy_hundredths()) / 100.0; }
    std::string accuracy_str() const;  // e.g. "70.64"
};

// round(num/den * 100, 2) with round-half-away-from-zero, returned in
// hundredths of a percent. Exact integer arithmetic; den must be positive.
long long percent_hundredths(long long num, long long den);

// Formats a number of hundredths as "dd.dd".
std::string format_hundredths(long long hundredths);

// Dense items x sources grid of votes. Construction validates the invariants:
// non-empty, duplicate-free ids, |cells| == |items| * |sources|.
class VoteMatrix {
public:
    VoteMatrix(std::vector<std::string> item_ids,
               std::vector<std::string> source_ids,
               std::vector<Vote> cells);  // row-major, cells[item * n_sources + source]

    std::size_t item_count() const { return item_ids_.size(); }
    std::size_t source_count() const { return source_ids_.size(); }

    Vote at(std::size_t item, std::size_t source) const;

    const std::vector<std::string>& item_ids() const { return item_ids_; }
    const std::vector<std::string>& source_ids() const { return source_ids_; }

    std::size_t item_index(const std::string& id) const;    // throws InvalidArgument
    std::size_t source_index(const std::string& id) const;  // throws InvalidArgument

    // New matrix keeping only the given source columns, in the given order.
    VoteMatrix select_sources(const std::vector<std::size_t>& source_indices) const;

    // New matrix with every vote negated (abstains stay abstains).
    VoteMatrix negated() const;

    std::size_t non_abstain_count() const;

private:
    std::vector<std::string> item_ids_;
    std::vector<std::string> source_ids_;
    std::vector<Vote> cells_;
    std::unordered_map<std::string, std::size_t> item_index_;
    std::unordered_map<std::string, std::size_t> source_index_;
};

// One raw LLM response, already parsed into a vote. Owned by the prompting
// module's store; declared here because build_vote_matrix consumes it.
struct RunRecord {
    std::string run_key;
    std::string example_id;
    std::string prompt_type;  // serialized PromptType name
    double temperature = 0.0;
    int run_index = 0;
    std::string model_name;
    std::string raw_response;
    Vote parsed_vote = Vote::abstain;
    std::string created_at;  // ISO-8601 UTC

    // Identity excludes raw_response/parsed_vote/created_at.
    bool same_identity(const RunRecord& other) const;
    // Content equality for idempotent puts: identity + raw_response + parsed_vote
    // (created_at deliberately excluded).
    bool same_content(const RunRecord& other) const;
};

// Maps a record to the id of the source column it belongs to, or nullopt to
// drop the record (e.g. when building a single-temperature matrix from a
// mixed store).
using SourceGrouping = std::function<std::optional<std::string>(const RunRecord&)>;

// Builds the dense matrix. Item ids default to sorted order of first
// appearance; pass item_order to pin dataset order. Missing (item, source)
// cells become abstain. Duplicate (item, source) pairs are fine when the votes
// agree and raise ConflictingRecords when they do not.
VoteMatrix build_vote_matrix(const std::vector<RunRecord>& records,
                             const SourceGrouping& grouping);
VoteMatrix build_vote_matrix(const std::vector<RunRecord>& records,
                             const SourceGrouping& grouping,
                             const std::vector<std::string>& item_order);

// Inverse of build_vote_matrix up to record ordering and raw text: one
// (item, source, vote) triple per cell.
struct VoteTriple {
    std::string item_id;
    std::string source_id;
    Vote vote;
};
std::vector<VoteTriple> flatten(const VoteMatrix& matrix);

// Exact-match accuracy of hard predictions against gold. Abstaining
// predictions count as incorrect. Item-id sets must match exactly
// (KeyMismatch lists the symmetric difference); gold must not abstain.
EvaluationResult accuracy(const LabelMap& predictions, const LabelMap& gold);

// Per-source diagnostics produced by validate_matrix.
struct SourceDiagnostics {
    std::string source_id;
    double coverage = 0.0;  // fraction of non-abstain cells in this column
    std::optional<double> positive_share;  // +1 fraction among non-abstain votes
    bool flagged = false;   // coverage < 0.5
};

struct MatrixDiagnostics {
    std::size_t item_count = 0;
    std::size_t source_count = 0;
    double abstain_rate = 0.0;  // over all cells
    std::vector<SourceDiagnostics> sources;
};

MatrixDiagnostics validate_matrix(const VoteMatrix& matrix);

}  // namespace verdict
