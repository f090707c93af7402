#pragma once
// File formats: dataset JSON-lines, vote/posterior/params/accuracy CSVs.

#include <string>
#include <vector>

#include "verdict/label_models.hpp"
#include "verdict/votes.hpp"

namespace verdict {

// Dataset: one JSON object per line,
//   {"id": str, "query": str, "articles": [str], "label": "Y"|"N"|null}
std::vector<EntailmentExample> load_dataset(const std::string& path);
void save_dataset(const std::vector<EntailmentExample>& examples, const std::string& path);

// Vote matrix as CSV with header item_id,source_id,vote (vote in {1,-1,0}).
void save_votes_csv(const VoteMatrix& matrix, const std::string& path);
VoteMatrix load_votes_csv(const std::string& path);

// Posteriors as CSV with header item_id,p_positive,hard_label.
void save_posteriors_csv(const PosteriorLabels& posteriors, const std::string& path);

// Symmetric-channel params: source_id,correlation,symmetric_accuracy,class_balance.
void save_source_params_csv(const SourceParams& params, const std::string& path);
// Confusion params: source_id,sensitivity,specificity,prior.
void save_confusion_params_csv(const ConfusionParams& params, const std::string& path);

// Minimal RFC-4180 helpers shared by the writers above and the report module.
std::string csv_escape(const std::string& field);
std::vector<std::string> csv_split(const std::string& line);

// Whole-file slurp/write with IoError on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit over the file bytes, hex-encoded; used for report provenance.
std::string file_fingerprint(const std::string& path);

}  // namespace verdict
