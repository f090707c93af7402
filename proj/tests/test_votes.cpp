#include <doctest.h>

#include "support/helpers.hpp"
#include "verdict/errors.hpp"
#include "verdict/votes.hpp"

using namespace verdict;
using verdict::testing::make_matrix;

namespace {

RunRecord rec(const std::string& example, const std::string& source, int vote) {
    RunRecord r;
    r.run_key = example + "/" + source;
    r.example_id = example;
    r.prompt_type = "reason_then_answer";
    r.temperature = 0.5;
    r.run_index = 0;
    r.model_name = source;  // grouped by model below
    r.parsed_vote = vote_from_value(vote);
    return r;
}

SourceGrouping by_model() {
    return [](const RunRecord& r) -> std::optional<std::string> { return r.model_name; };
}

}  // namespace

TEST_CASE("percent arithmetic rounds half away from zero on exact fractions") {
    CHECK(percent_hundredths(77, 109) == 7064);
    CHECK(percent_hundredths(83, 109) == 7615);
    CHECK(percent_hundredths(5, 109) == 459);  // 4.587... -> 4.59
    CHECK(percent_hundredths(0, 7) == 0);
    CHECK(percent_hundredths(7, 7) == 10000);
    CHECK(percent_hundredths(1, 8) == 1250);
    // exact .5 hundredths: 1/800 of 100% = 0.125% -> 0.13
    CHECK(percent_hundredths(1, 800) == 13);
    CHECK(percent_hundredths(-1, 800) == -13);
    CHECK(percent_hundredths(3, 800) == 38);  // 0.375 -> 0.38
    CHECK_THROWS_AS(percent_hundredths(1, 0), InvalidArgument);
}

TEST_CASE("format_hundredths prints two decimals") {
    CHECK(format_hundredths(7064) == "70.64");
    CHECK(format_hundredths(459) == "4.59");
    CHECK(format_hundredths(0) == "0.00");
    CHECK(format_hundredths(10000) == "100.00");
    CHECK(format_hundredths(7) == "0.07");
    CHECK(format_hundredths(-459) == "-4.59");
}

TEST_CASE("EvaluationResult formats its accuracy") {
    EvaluationResult r{77, 109};
    CHECK(r.accuracy_hundredths() == 7064);
    CHECK(r.accuracy_str() == "70.64");
    CHECK(EvaluationResult{109, 109}.accuracy_str() == "100.00");
    CHECK_THROWS_AS((EvaluationResult{0, 0}.accuracy_hundredths()), InvalidArgument);
}

TEST_CASE("accuracy counts exact matches and treats abstains as wrong") {
    LabelMap gold{{"a", Vote::yes}, {"b", Vote::no}, {"c", Vote::yes}};
    LabelMap pred{{"a", Vote::yes}, {"b", Vote::yes}, {"c", Vote::abstain}};
    const EvaluationResult r = accuracy(pred, gold);
    CHECK(r.correct == 1);
    CHECK(r.total == 3);

    LabelMap all = gold;
    CHECK(accuracy(all, gold).correct == 3);
}

TEST_CASE("accuracy rejects key mismatches, listing the difference") {
    LabelMap gold{{"a", Vote::yes}, {"b", Vote::no}};
    LabelMap pred{{"a", Vote::yes}, {"z", Vote::no}};
    try {
        accuracy(pred, gold);
        FAIL("expected KeyMismatch");
    } catch (const KeyMismatch& e) {
        const std::string msg = e.what();
        CHECK(msg.find("b") != std::string::npos);
        CHECK(msg.find("z") != std::string::npos);
    }
}

TEST_CASE("accuracy rejects abstain gold labels") {
    LabelMap gold{{"a", Vote::abstain}};
    LabelMap pred{{"a", Vote::yes}};
    CHECK_THROWS_AS(accuracy(pred, gold), InvalidArgument);
}

TEST_CASE("gold_labels keeps only labeled examples") {
    EntailmentExample a{"a", "q", {"art"}, Vote::yes};
    EntailmentExample b{"b", "q", {"art"}, std::nullopt};
    const LabelMap gold = gold_labels({a, b});
    CHECK(gold.size() == 1);
    CHECK(gold.at("a") == Vote::yes);
}

TEST_CASE("EntailmentExample validation") {
    CHECK_THROWS_AS((EntailmentExample{"", "q", {"art"}, std::nullopt}.validate()),
                    InvalidArgument);
    CHECK_THROWS_AS((EntailmentExample{"x", "q", {}, std::nullopt}.validate()), InvalidArgument);
    CHECK_THROWS_AS((EntailmentExample{"x", "q", {"art"}, Vote::abstain}.validate()),
                    InvalidArgument);
    CHECK_NOTHROW((EntailmentExample{"x", "q", {"art"}, Vote::no}.validate()));
}

TEST_CASE("VoteMatrix enforces shape and id uniqueness") {
    CHECK_THROWS_AS(VoteMatrix({}, {"s"}, {}), InvalidArgument);
    CHECK_THROWS_AS(VoteMatrix({"i"}, {}, {}), InvalidArgument);
    CHECK_THROWS_AS(VoteMatrix({"i", "i"}, {"s"}, {Vote::yes, Vote::yes}), InvalidArgument);
    CHECK_THROWS_AS(VoteMatrix({"i"}, {"s"}, {Vote::yes, Vote::no}), InvalidArgument);

    const VoteMatrix m = make_matrix({{1, -1}, {0, 1}});
    CHECK(m.item_count() == 2);
    CHECK(m.source_count() == 2);
    CHECK(m.at(0, 1) == Vote::no);
    CHECK(m.at(1, 0) == Vote::abstain);
    CHECK_THROWS_AS(m.at(2, 0), InvalidArgument);
    CHECK(m.non_abstain_count() == 3);
    CHECK_THROWS_AS(m.item_index("nope"), InvalidArgument);
}

TEST_CASE("select_sources keeps requested columns in order") {
    const VoteMatrix m = make_matrix({{1, -1, 0}, {0, 1, 1}});
    const VoteMatrix sub = m.select_sources({2, 0});
    CHECK(sub.source_count() == 2);
    CHECK(sub.source_ids()[0] == m.source_ids()[2]);
    CHECK(sub.at(0, 0) == Vote::abstain);
    CHECK(sub.at(0, 1) == Vote::yes);
    CHECK(sub.at(1, 0) == Vote::yes);
    CHECK_THROWS_AS(m.select_sources({9}), InvalidArgument);
}

TEST_CASE("negated flips votes and keeps abstains") {
    const VoteMatrix m = make_matrix({{1, -1, 0}});
    const VoteMatrix n = m.negated();
    CHECK(n.at(0, 0) == Vote::no);
    CHECK(n.at(0, 1) == Vote::yes);
    CHECK(n.at(0, 2) == Vote::abstain);
}

TEST_CASE("build_vote_matrix arranges votes and fills gaps with abstain") {
    std::vector<RunRecord> records = {rec("q1", "runA", 1), rec("q1", "runB", 1),
                                      rec("q2", "runA", 1)};
    const VoteMatrix m = build_vote_matrix(records, by_model());
    CHECK(m.item_count() == 2);
    CHECK(m.source_count() == 2);
    // default ordering is sorted ids
    CHECK(m.item_ids() == std::vector<std::string>{"q1", "q2"});
    CHECK(m.source_ids() == std::vector<std::string>{"runA", "runB"});
    CHECK(m.at(0, 0) == Vote::yes);
    CHECK(m.at(1, 1) == Vote::abstain);  // missing (q2, runB)
}

TEST_CASE("build_vote_matrix honors an explicit item order") {
    std::vector<RunRecord> records = {rec("q1", "runA", 1), rec("q2", "runA", -1)};
    const VoteMatrix m = build_vote_matrix(records, by_model(), {"q2", "q1"});
    CHECK(m.item_ids() == std::vector<std::string>{"q2", "q1"});
    CHECK(m.at(0, 0) == Vote::no);

    CHECK_THROWS_AS(build_vote_matrix(records, by_model(), {"q1"}), InvalidArgument);
}

TEST_CASE("build_vote_matrix rejects conflicting duplicates, allows identical ones") {
    std::vector<RunRecord> ok = {rec("q1", "runA", 1), rec("q1", "runA", 1)};
    CHECK_NOTHROW(build_vote_matrix(ok, by_model()));

    std::vector<RunRecord> bad = {rec("q1", "runA", 1), rec("q1", "runA", -1)};
    try {
        build_vote_matrix(bad, by_model());
        FAIL("expected ConflictingRecords");
    } catch (const ConflictingRecords& e) {
        const std::string msg = e.what();
        CHECK(msg.find("q1") != std::string::npos);
        CHECK(msg.find("runA") != std::string::npos);
    }
}

TEST_CASE("build_vote_matrix respects the grouping filter") {
    std::vector<RunRecord> records = {rec("q1", "keep", 1), rec("q1", "drop", -1)};
    SourceGrouping only_keep = [](const RunRecord& r) -> std::optional<std::string> {
        if (r.model_name == "drop") return std::nullopt;
        return r.model_name;
    };
    const VoteMatrix m = build_vote_matrix(records, only_keep);
    CHECK(m.source_count() == 1);

    SourceGrouping none = [](const RunRecord&) -> std::optional<std::string> {
        return std::nullopt;
    };
    CHECK_THROWS_AS(build_vote_matrix(records, none), EmptyInput);
}

TEST_CASE("flatten inverts build_vote_matrix up to ordering") {
    std::vector<RunRecord> records = {rec("q1", "runA", 1), rec("q2", "runA", -1),
                                      rec("q1", "runB", 0)};
    const VoteMatrix m = build_vote_matrix(records, by_model());
    const auto triples = flatten(m);
    CHECK(triples.size() == m.item_count() * m.source_count());
    for (const auto& t : triples) {
        CHECK(m.at(m.item_index(t.item_id), m.source_index(t.source_id)) == t.vote);
    }
}

TEST_CASE("validate_matrix reports coverage, abstain rate and flags") {
    SUBCASE("all-abstain column is flagged with zero coverage") {
        const VoteMatrix m = make_matrix({{1, 0}, {-1, 0}});
        const MatrixDiagnostics d = validate_matrix(m);
        CHECK(d.item_count == 2);
        CHECK(d.source_count == 2);
        CHECK(d.sources[0].coverage == doctest::Approx(1.0));
        CHECK_FALSE(d.sources[0].flagged);
        CHECK(d.sources[1].coverage == doctest::Approx(0.0));
        CHECK(d.sources[1].flagged);
        CHECK_FALSE(d.sources[1].positive_share.has_value());
        CHECK(d.abstain_rate == doctest::Approx(0.5));
    }
    SUBCASE("full coverage yields no flags") {
        const VoteMatrix m = make_matrix({{1, -1}, {1, 1}});
        const MatrixDiagnostics d = validate_matrix(m);
        for (const auto& s : d.sources) {
            CHECK(s.coverage == doctest::Approx(1.0));
            CHECK_FALSE(s.flagged);
        }
        CHECK(d.abstain_rate == doctest::Approx(0.0));
        CHECK(*d.sources[0].positive_share == doctest::Approx(1.0));
        CHECK(*d.sources[1].positive_share == doctest::Approx(0.5));
    }
    SUBCASE("one abstain in a four-item column gives coverage 0.75") {
        const VoteMatrix m = make_matrix({{1}, {0}, {1}, {-1}});
        const MatrixDiagnostics d = validate_matrix(m);
        CHECK(d.sources[0].coverage == doctest::Approx(0.75));
        CHECK_FALSE(d.sources[0].flagged);
    }
}
