#include "verdict/prompting.hpp"

#include <cctype>
#include <cstdio>
#include <optional>

#include "verdict/errors.hpp"
#include "verdict/hash.hpp"

namespace verdict {

namespace {

constexpr const char* kPreamble =
    "Given a query (which is delimited with triple backticks) and the related articles "
    "(which is also delimited with triple backticks). Is the query entailed by the related "
    "articles?";

constexpr const char* kAnswerOnlyInstruction =
    " Please provide a simple answer of either \"Yes\" or \"No\", without any explanation.";

constexpr const char* kAnswerThenExplainInstruction =
    " Please provide the answer of \"Yes\" or \"No\", then provide an explanation.";

constexpr const char* kReasonThenAnswerInstruction =
    " To answer, please use the following format:\n"
    "  Step-by-step reasoning: <your step-by-step reasoning>\n"
    "  Answer: <a clear \"Yes\" or \"No\" response>";

std::string join_articles(const std::vector<std::string>& articles) {
    std::string out;
    for (std::size_t i = 0; i < articles.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += articles[i];
    }
    return out;
}

}  // namespace

std::string prompt_type_name(PromptType type) {
    switch (type) {
        case PromptType::answer_only: return "answer_only";
        case PromptType::answer_then_explain: return "answer_then_explain";
        case PromptType::reason_then_answer: return "reason_then_answer";
    }
    throw InvalidArgument("invalid prompt type");
}

PromptType prompt_type_from_name(const std::string& name) {
    if (name == "answer_only") return PromptType::answer_only;
    if (name == "answer_then_explain") return PromptType::answer_then_explain;
    if (name == "reason_then_answer") return PromptType::reason_then_answer;
    throw InvalidArgument("unknown prompt type '" + name + "'");
}

std::string render_prompt(const EntailmentExample& example, PromptType type) {
    std::string body = kPreamble;
    switch (type) {
        case PromptType::answer_only: body += kAnswerOnlyInstruction; break;
        case PromptType::answer_then_explain: body += kAnswerThenExplainInstruction; break;
        case PromptType::reason_then_answer: body += kReasonThenAnswerInstruction; break;
    }
    body += "\n\nQuery: ```" + example.query + "```";
    body += "\n\nRelated articles: ```" + join_articles(example.articles) + "```";
    return body;
}

namespace {

bool is_token_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// Scans text token by token; the first standalone yes/no decides.
Vote first_token_vote(const std::string& text) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_token_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_token_char(text[j])) ++j;
        const std::size_t len = j - i;
        if (len == 3 && lower(text[i]) == 'y' && lower(text[i + 1]) == 'e' && lower(text[i + 2]) == 's') {
            return Vote::yes;
        }
        if (len == 2 && lower(text[i]) == 'n' && lower(text[i + 1]) == 'o') {
            return Vote::no;
        }
        i = j;
    }
    return Vote::abstain;
}

// Yes/No occurrence check over a whole fragment; both present -> ambiguous.
Vote fragment_vote(const std::string& text) {
    bool has_yes = false, has_no = false;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_token_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_token_char(text[j])) ++j;
        const std::size_t len = j - i;
        if (len == 3 && lower(text[i]) == 'y' && lower(text[i + 1]) == 'e' && lower(text[i + 2]) == 's') {
            has_yes = true;
        }
        if (len == 2 && lower(text[i]) == 'n' && lower(text[i + 1]) == 'o') {
            has_no = true;
        }
        i = j;
    }
    if (has_yes == has_no) return Vote::abstain;
    return has_yes ? Vote::yes : Vote::no;
}

// Matches "Answer:" at the start of a line after markdown decoration
// (whitespace, *, _, #, >, -, `). Returns the text after the colon, or
// nullopt when the line is not an answer line.
std::optional<std::string> answer_line_payload(const std::string& line) {
    static constexpr const char* kWord = "answer";
    std::size_t i = 0;
    while (i < line.size() && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == '*' ||
                               line[i] == '_' || line[i] == '#' || line[i] == '>' || line[i] == '-' ||
                               line[i] == '`')) {
        ++i;
    }
    for (std::size_t k = 0; kWord[k] != '\0'; ++k, ++i) {
        if (i >= line.size() || lower(line[i]) != kWord[k]) return std::nullopt;
    }
    while (i < line.size() && (line[i] == ' ' || line[i] == '*' || line[i] == '_' || line[i] == '`')) ++i;
    if (i >= line.size() || line[i] != ':') return std::nullopt;
    return line.substr(i + 1);
}

}  // namespace

Vote parse_answer(const std::string& raw_response, PromptType type) {
    if (type != PromptType::reason_then_answer) {
        return first_token_vote(raw_response);
    }

    // Prefer the last "Answer:" line; chains sometimes restate the format
    // line before reasoning.
    std::optional<std::string> payload;
    std::size_t start = 0;
    while (start <= raw_response.size()) {
        std::size_t end = raw_response.find('\n', start);
        if (end == std::string::npos) end = raw_response.size();
        const std::string line = raw_response.substr(start, end - start);
        if (auto p = answer_line_payload(line)) payload = std::move(p);
        if (end == raw_response.size()) break;
        start = end + 1;
    }
    if (!payload) return Vote::abstain;
    return fragment_vote(*payload);
}

std::string format_temperature(double temperature) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", temperature);
    return buf;
}

std::string make_run_key(const std::string& model_name,
                         PromptType type,
                         double temperature,
                         int run_index,
                         const std::string& example_id,
                         const std::string& rendered_prompt) {
    // '\x1f' separators keep field boundaries unambiguous.
    std::string material = model_name;
    material += '\x1f';
    material += prompt_type_name(type);
    material += '\x1f';
    material += format_temperature(temperature);
    material += '\x1f';
    material += std::to_string(run_index);
    material += '\x1f';
    material += example_id;
    material += '\x1f';
    material += rendered_prompt;
    return fnv1a_hex(material);
}

}  // namespace verdict
