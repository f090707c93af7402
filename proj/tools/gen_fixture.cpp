// Deterministic fixture generator. Re-running it reproduces the checked-in
// fixtures byte for byte: only mt19937_64's specified raw output is used
// (no std distributions, whose streams vary across standard libraries).

#include <cassert>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "verdict/io.hpp"
#include "verdict/prompting.hpp"
#include "verdict/run_store.hpp"
#include "verdict/votes.hpp"

using namespace verdict;
namespace fs = std::filesystem;

namespace {

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double unit() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(engine() % n); }
};

const char* kSubjects[20] = {
    "sale",      "lease",    "mandate",   "deposit",   "guaranty",
    "loan",      "exchange", "gift",      "carriage",  "employment",
    "insurance", "pledge",   "agency",    "brokerage", "storage",
    "supply",    "license",  "franchise", "transport", "settlement"};

const char* kActs[20] = {
    "transfer ownership of specified property",
    "allow the use of the leased thing",
    "administer the affairs entrusted",
    "keep the deposited thing in custody",
    "perform the obligation of the principal debtor",
    "deliver a sum of money for consumption",
    "transfer a right other than money",
    "confer property without compensation",
    "move goods to the agreed destination",
    "engage in work under direction",
    "cover the insured risk",
    "hold the pledged thing as security",
    "conclude juridical acts on behalf of the principal",
    "mediate the conclusion of a contract",
    "store the goods in a warehouse",
    "supply goods of a kind fixed in advance",
    "permit the exploitation of the licensed right",
    "operate under the licensed business format",
    "carry passengers to the agreed place",
    "end the dispute by mutual concessions"};

std::vector<EntailmentExample> make_dataset20() {
    std::vector<EntailmentExample> out;
    Rng rng(411);
    for (int i = 0; i < 20; ++i) {
        EntailmentExample ex;
        char id[8];
        std::snprintf(id, sizeof(id), "q%02d", i + 1);
        ex.id = id;
        const std::string subject = kSubjects[i];
        const std::string act = kActs[i];
        const int article_no = 101 + 7 * i;

        ex.articles.push_back("Article " + std::to_string(article_no) + ": A contract of " +
                              subject + " becomes effective when one of the parties promises to " +
                              act + " and the other party agrees to this.");
        if (i % 4 == 2) {
            ex.articles.push_back("Article " + std::to_string(article_no + 1) +
                                  ": The provisions of the preceding Article apply mutatis "
                                  "mutandis to cases where the agreement is made for value.");
        }

        // Even items: entailed paraphrase. Odd items: an overreaching claim.
        if (rng.unit() < 0.55) {
            ex.query = "A contract of " + subject +
                       " becomes effective at the time the parties agree that one of them will " +
                       act + ".";
            ex.gold = Vote::yes;
        } else {
            ex.query = "A contract of " + subject +
                       " becomes effective only upon delivery of its subject matter, even if one "
                       "party has promised to " +
                       act + ".";
            ex.gold = Vote::no;
        }
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<EntailmentExample> make_dataset109() {
    std::vector<EntailmentExample> out;
    Rng rng(109109);
    for (int i = 0; i < 109; ++i) {
        EntailmentExample ex;
        char id[8];
        std::snprintf(id, sizeof(id), "r%03d", i + 1);
        ex.id = id;
        const std::string subject = kSubjects[i % 20];
        ex.articles.push_back("Article " + std::to_string(500 + i) +
                              ": An obligation arising from a contract of " + subject +
                              " is extinguished when performance is tendered as agreed.");
        const bool positive = rng.unit() < 0.55;
        if (positive) {
            ex.query = "Tender of the agreed performance extinguishes an obligation arising from "
                       "a contract of " +
                       subject + ".";
            ex.gold = Vote::yes;
        } else {
            ex.query = "An obligation arising from a contract of " + subject +
                       " is extinguished only by a court judgment.";
            ex.gold = Vote::no;
        }
        out.push_back(std::move(ex));
    }
    return out;
}

std::string reasoning_body(const EntailmentExample& ex, Rng& rng) {
    const std::string& article = ex.articles[0];
    const std::string head = article.substr(0, article.find(':'));
    std::string body = "Step-by-step reasoning:\n";
    body += "  1. " + head + " sets out when the contract in question becomes effective.\n";
    switch (rng.pick(3)) {
        case 0:
            body += "  2. The query restates the condition described by the article.\n";
            break;
        case 1:
            body += "  2. The query adds a requirement that the article does not mention.\n";
            break;
        default:
            body += "  2. Comparing the query with the article shows the operative condition.\n";
            break;
    }
    return body;
}

std::string answer_line(Vote vote, Rng& rng) {
    static const char* kYes[3] = {"Yes", "yes", "YES"};
    static const char* kNo[3] = {"No", "no", "NO"};
    const std::string word = (vote == Vote::yes) ? kYes[rng.pick(3)] : kNo[rng.pick(3)];
    switch (rng.pick(6)) {
        case 0: return "Answer: " + word;
        case 1: return "**Answer:** " + word + ".";
        case 2: return "answer: " + word;
        case 3: return "Answer: " + word + ".";
        case 4: return "> Answer: " + word;
        default: return "  Answer: " + word;
    }
}

std::string abstain_response(Rng& rng) {
    switch (rng.pick(3)) {
        case 0:
            return "Step-by-step reasoning:\n  1. The article covers formation of the "
                   "contract.\n  2. The query turns on a point the article does not "
                   "resolve.\nAnswer: It cannot be determined from the given articles.";
        case 1:
            return "I cannot determine whether the query is entailed by the given articles.";
        default:
            return "Step-by-step reasoning:\n  1. The provisions are ambiguous here.\nAnswer: "
                   "Unclear.";
    }
}

void build_store(const std::vector<EntailmentExample>& dataset, const std::string& path) {
    fs::remove(path);
    RunStore store(path);
    Rng rng(7321);
    const std::string model = "stub-chat-1";
    const PromptType prompt = PromptType::reason_then_answer;

    for (int ti = 1; ti <= 10; ++ti) {
        const double temperature = ti / 10.0;
        for (int run = 0; run < 10; ++run) {
            for (std::size_t e = 0; e < dataset.size(); ++e) {
                const EntailmentExample& ex = dataset[e];
                // difficulty tiers; accuracy decays as temperature rises
                const double base = (e % 3 == 0) ? 0.93 : (e % 3 == 1) ? 0.82 : 0.64;
                const double p_correct = std::max(0.5, base - 0.20 * (temperature - 0.1));
                const double p_abstain = 0.01 + 0.05 * temperature;

                std::string raw;
                const double roll = rng.unit();
                if (roll < p_abstain) {
                    raw = abstain_response(rng);
                } else {
                    const bool correct = rng.unit() < p_correct;
                    const Vote vote = correct ? *ex.gold
                                              : (*ex.gold == Vote::yes ? Vote::no : Vote::yes);
                    raw = reasoning_body(ex, rng) + answer_line(vote, rng);
                }

                RunRecord rec;
                rec.example_id = ex.id;
                rec.prompt_type = prompt_type_name(prompt);
                rec.temperature = temperature;
                rec.run_index = run;
                rec.model_name = model;
                rec.raw_response = raw;
                rec.parsed_vote = parse_answer(raw, prompt);
                rec.created_at = "2026-01-05T00:00:00Z";
                rec.run_key = make_run_key(model, prompt, temperature, run, ex.id,
                                           render_prompt(ex, prompt));
                store.put(rec);
            }
        }
    }
    std::printf("store: %zu records -> %s\n", store.size(), path.c_str());
}

void build_votes109(const std::vector<EntailmentExample>& dataset, const std::string& path) {
    Rng rng(20260109);
    std::vector<std::string> item_ids;
    for (const auto& ex : dataset) item_ids.push_back(ex.id);
    std::vector<std::string> source_ids;
    for (int s = 0; s < 10; ++s) source_ids.push_back("run" + std::to_string(s));

    std::vector<Vote> cells;
    cells.reserve(item_ids.size() * source_ids.size());
    for (const auto& ex : dataset) {
        for (int s = 0; s < 10; ++s) {
            const double accuracy = 0.64 + 0.03 * s;  // 0.64 .. 0.91
            if (rng.unit() < 0.04) {
                cells.push_back(Vote::abstain);
            } else if (rng.unit() < accuracy) {
                cells.push_back(*ex.gold);
            } else {
                cells.push_back(*ex.gold == Vote::yes ? Vote::no : Vote::yes);
            }
        }
    }
    const VoteMatrix matrix(item_ids, source_ids, cells);
    save_votes_csv(matrix, path);
    std::printf("votes: %zux%zu matrix -> %s\n", matrix.item_count(), matrix.source_count(),
                path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    const std::string out_dir = (argc > 1) ? argv[1] : "fixtures";
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    const auto dataset20 = make_dataset20();
    save_dataset(dataset20, (dir / "dataset.jsonl").string());
    std::printf("dataset: %zu examples -> %s\n", dataset20.size(),
                (dir / "dataset.jsonl").c_str());

    const auto dataset109 = make_dataset109();
    save_dataset(dataset109, (dir / "dataset109.jsonl").string());
    std::printf("dataset: %zu examples -> %s\n", dataset109.size(),
                (dir / "dataset109.jsonl").c_str());

    build_store(dataset20, (dir / "store.jsonl").string());
    build_votes109(dataset109, (dir / "votes_109x10.csv").string());
    return 0;
}
