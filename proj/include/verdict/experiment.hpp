#pragma once
// Sweep orchestration plus the table machinery: per-run accuracy stats by
// temperature, the estimator x temperature grid, and the subset-combination
// study. All accuracy arithmetic stays in exact fractions; rounding happens
// only when formatting.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "verdict/completion.hpp"
#include "verdict/label_models.hpp"
#include "verdict/run_store.hpp"
#include "verdict/stats.hpp"
#include "verdict/votes.hpp"

namespace verdict {

struct SweepSummary {
    std::size_t total = 0;    // tasks enumerated
    std::size_t cached = 0;   // served from the store
    std::size_t fetched = 0;  // satisfied via the completer
};

// Ensures one RunRecord per (example, temperature, run_index) triple.
// Already-stored keys are skipped, so an interrupted sweep resumes where it
// left off. completer == nullptr means replay mode (missing key -> CacheMiss).
// Up to config.max_parallel_requests completions run concurrently; on failure
// the first error is rethrown after in-flight work drains, with all fetched
// records already persisted.
SweepSummary sweep(const std::vector<EntailmentExample>& dataset,
                   const RunConfig& config,
                   RunStore& store,
                   Completer* completer);

// Per-run accuracy against gold for one (temperature, run_index) source.
struct RunAccuracy {
    double temperature = 0.0;
    std::string source_id;  // "run0", "run1", ...
    EvaluationResult result;
};

// Scores every run of every temperature against the dataset's gold labels.
// Records outside the dataset are ignored; a gold item with no record for
// some run surfaces as KeyMismatch. Abstains count as wrong.
std::vector<RunAccuracy> per_run_accuracies(const RunStore& store,
                                            const std::vector<EntailmentExample>& dataset,
                                            const std::string& model_name,
                                            PromptType prompt_type,
                                            const std::vector<double>& temperatures);

struct TemperatureStats {
    double temperature = 0.0;
    FracStats stats;  // max, min, max_minus_min, avg, median over run accuracies
};
using RunStatsTable = std::vector<TemperatureStats>;

// Stats over exact per-run accuracy fractions, one row per temperature.
// max_minus_min is differenced in the fraction domain, so e.g. fractions
// rounding to 73.39 and 68.81 can legitimately show a gap of 4.59.
RunStatsTable run_stats(
    const std::vector<std::pair<double, std::vector<Frac>>>& accuracies_by_temperature);

// One vote matrix per requested temperature; sources are individual runs.
// Throws EmptyInput for a temperature with no matching records.
std::vector<std::pair<double, VoteMatrix>> votes_by_temperature(
    const RunStore& store,
    const std::vector<EntailmentExample>& dataset,
    const std::string& model_name,
    PromptType prompt_type,
    const std::vector<double>& temperatures);

struct GridResult {
    std::vector<std::string> estimators;   // row labels, caller order
    std::vector<double> temperatures;      // column labels, caller order
    std::vector<std::vector<Frac>> cells;  // [estimator][temperature]
    std::vector<Frac> row_avg;             // per estimator, over temperatures
    std::vector<Frac> col_avg;             // per temperature, over estimators
    Frac grand_avg{0};                     // over all cells
};

// Accuracy of harden(estimator(matrix)) against gold for every
// (estimator, temperature) cell, plus AVG row/column computed on the
// unrounded fractions. Unknown estimator names throw UnknownModel before
// any fitting starts.
GridResult label_model_grid(const std::vector<std::pair<double, VoteMatrix>>& matrices,
                            const LabelMap& gold,
                            const std::vector<std::string>& estimators,
                            const FitConfig& config = {},
                            const EstimatorRegistry& registry = EstimatorRegistry::builtin());

struct CombinationStats {
    int k = 0;
    long long combinations = 0;  // == C(m, k)
    FracStats stats;             // over per-subset estimator accuracies
};

inline constexpr long long kDefaultCombinationCap = 1'000'000;

// min(C(m, k), cap + 1) without overflow; values above cap are not exact.
long long binomial_capped(int m, int k, long long cap);

// Evaluates the estimator on every k-column submatrix (subsets enumerated in
// lexicographic source-index order) and aggregates the resulting accuracy
// fractions. C(m, k) above the cap -> TooManyCombinations.
CombinationStats subset_combinations(const VoteMatrix& matrix,
                                     int k,
                                     const std::string& estimator,
                                     const LabelMap& gold,
                                     const FitConfig& config = {},
                                     long long max_combinations = kDefaultCombinationCap,
                                     const EstimatorRegistry& registry = EstimatorRegistry::builtin());

}  // namespace verdict
