#pragma once
// Prompt templates and Yes/No answer extraction.

#include <string>

#include "verdict/votes.hpp"

namespace verdict {

enum class PromptType {
    answer_only,
    answer_then_explain,
    reason_then_answer,
};

// Serialized names: "answer_only", "answer_then_explain", "reason_then_answer".
std::string prompt_type_name(PromptType type);
PromptType prompt_type_from_name(const std::string& name);  // throws InvalidArgument

// Renders the single user message for the given template. The query and the
// articles (joined by blank lines) each sit inside one triple-backtick block.
// Deterministic; output depends only on (example content, prompt type).
std::string render_prompt(const EntailmentExample& example, PromptType type);

// Extracts a vote from a raw model response.
//   reason_then_answer: take the LAST line starting with "Answer:" (case-
//     insensitive, markdown/punctuation tolerated) and match the Yes/No token
//     on it; a line carrying both tokens is ambiguous.
//   answer_only / answer_then_explain: the first standalone Yes/No token.
// Anything unmatched is an abstain; parsing never fails.
Vote parse_answer(const std::string& raw_response, PromptType type);

// Cache key for one completion: FNV-1a over
// (model_name, prompt_type, temperature, run_index, example_id, rendered prompt).
std::string make_run_key(const std::string& model_name,
                         PromptType type,
                         double temperature,
                         int run_index,
                         const std::string& example_id,
                         const std::string& rendered_prompt);

// Canonical shortest text for a temperature value, used in keys and filenames.
std::string format_temperature(double temperature);

}  // namespace verdict
