#include "verdict/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "verdict/errors.hpp"
#include "verdict/prompting.hpp"

namespace verdict {

namespace {

bool same_temperature(double a, double b) {
    // Temperatures travel through text (configs, JSONL); comparing the
    // canonical rendering avoids accumulated representation noise.
    return format_temperature(a) == format_temperature(b);
}

std::string run_source_id(int run_index) { return "run" + std::to_string(run_index); }

}  // namespace

SweepSummary sweep(const std::vector<EntailmentExample>& dataset,
                   const RunConfig& config,
                   RunStore& store,
                   Completer* completer) {
    config.validate();
    if (dataset.empty()) throw EmptyInput("sweep over an empty dataset");
    for (const auto& ex : dataset) ex.validate();

    std::vector<std::string> rendered(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        rendered[i] = render_prompt(dataset[i], config.prompt_type);

    struct Task {
        std::size_t example_index;
        double temperature;
        int run_index;
    };
    std::vector<Task> tasks;
    tasks.reserve(dataset.size() * config.temperatures.size() *
                  static_cast<std::size_t>(config.runs_per_temperature));
    for (double t : config.temperatures)
        for (int r = 0; r < config.runs_per_temperature; ++r)
            for (std::size_t e = 0; e < dataset.size(); ++e) tasks.push_back({e, t, r});

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> cached{0};
    std::atomic<std::size_t> fetched{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            RunIdentity identity{dataset[task.example_index].id, config.prompt_type,
                                 task.temperature, task.run_index, config.model_name};
            try {
                const std::string key =
                    make_run_key(identity.model_name, identity.prompt_type, identity.temperature,
                                 identity.run_index, identity.example_id,
                                 rendered[task.example_index]);
                const bool hit = store.contains(key);
                complete(rendered[task.example_index], identity, store, completer);
                (hit ? cached : fetched).fetch_add(1);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    const std::size_t n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(config.max_parallel_requests), tasks.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return {tasks.size(), cached.load(), fetched.load()};
}

std::vector<RunAccuracy> per_run_accuracies(const RunStore& store,
                                            const std::vector<EntailmentExample>& dataset,
                                            const std::string& model_name,
                                            PromptType prompt_type,
                                            const std::vector<double>& temperatures) {
    const LabelMap gold = gold_labels(dataset);
    if (gold.empty()) throw EmptyInput("dataset has no gold labels to score against");
    const std::string prompt_name = prompt_type_name(prompt_type);

    std::vector<RunAccuracy> out;
    for (double t : temperatures) {
        // run_index -> predictions over gold items
        std::map<int, LabelMap> by_run;
        for (const auto& rec : store.list()) {
            if (rec.model_name != model_name || rec.prompt_type != prompt_name) continue;
            if (!same_temperature(rec.temperature, t)) continue;
            if (gold.find(rec.example_id) == gold.end()) continue;
            by_run[rec.run_index][rec.example_id] = rec.parsed_vote;
        }
        if (by_run.empty())
            throw EmptyInput("no run records for temperature " + format_temperature(t));
        for (const auto& [run_index, predictions] : by_run) {
            out.push_back({t, run_source_id(run_index), accuracy(predictions, gold)});
        }
    }
    return out;
}

RunStatsTable run_stats(
    const std::vector<std::pair<double, std::vector<Frac>>>& accuracies_by_temperature) {
    RunStatsTable table;
    table.reserve(accuracies_by_temperature.size());
    for (const auto& [temperature, accuracies] : accuracies_by_temperature) {
        if (accuracies.empty())
            throw EmptyInput("no run accuracies for temperature " + format_temperature(temperature));
        table.push_back({temperature, frac_stats(accuracies)});
    }
    return table;
}

std::vector<std::pair<double, VoteMatrix>> votes_by_temperature(
    const RunStore& store,
    const std::vector<EntailmentExample>& dataset,
    const std::string& model_name,
    PromptType prompt_type,
    const std::vector<double>& temperatures) {
    std::unordered_set<std::string> ids;
    std::vector<std::string> item_order;
    for (const auto& ex : dataset) {
        if (ids.insert(ex.id).second) item_order.push_back(ex.id);
    }
    const std::string prompt_name = prompt_type_name(prompt_type);
    const auto records = store.list();

    std::vector<std::pair<double, VoteMatrix>> out;
    out.reserve(temperatures.size());
    for (double t : temperatures) {
        SourceGrouping grouping = [&](const RunRecord& rec) -> std::optional<std::string> {
            if (rec.model_name != model_name || rec.prompt_type != prompt_name) return std::nullopt;
            if (!same_temperature(rec.temperature, t)) return std::nullopt;
            if (ids.find(rec.example_id) == ids.end()) return std::nullopt;
            return run_source_id(rec.run_index);
        };
        try {
            out.emplace_back(t, build_vote_matrix(records, grouping, item_order));
        } catch (const EmptyInput&) {
            throw EmptyInput("no run records for temperature " + format_temperature(t));
        }
    }
    return out;
}

GridResult label_model_grid(const std::vector<std::pair<double, VoteMatrix>>& matrices,
                            const LabelMap& gold,
                            const std::vector<std::string>& estimators,
                            const FitConfig& config,
                            const EstimatorRegistry& registry) {
    if (matrices.empty()) throw EmptyInput("label_model_grid needs at least one matrix");
    if (estimators.empty()) throw EmptyInput("label_model_grid needs at least one estimator");
    if (gold.empty()) throw EmptyInput("label_model_grid needs gold labels");

    std::vector<EstimatorFn> fns;
    fns.reserve(estimators.size());
    for (const auto& name : estimators) fns.push_back(registry.get(name));

    GridResult grid;
    grid.estimators = estimators;
    grid.temperatures.reserve(matrices.size());
    for (const auto& [t, matrix] : matrices) {
        (void)matrix;
        grid.temperatures.push_back(t);
    }
    grid.cells.assign(estimators.size(), std::vector<Frac>(matrices.size(), Frac{0}));

    for (std::size_t row = 0; row < fns.size(); ++row) {
        for (std::size_t col = 0; col < matrices.size(); ++col) {
            const PosteriorLabels posteriors = fns[row](matrices[col].second, config);
            const EvaluationResult result = accuracy(harden(posteriors), gold);
            grid.cells[row][col] = accuracy_frac(result);
        }
    }

    grid.row_avg.assign(estimators.size(), Frac{0});
    grid.col_avg.assign(matrices.size(), Frac{0});
    Frac sum_all{0};
    for (std::size_t row = 0; row < grid.cells.size(); ++row) {
        Frac row_sum{0};
        for (Frac cell : grid.cells[row]) row_sum += cell;
        grid.row_avg[row] = row_sum / Frac(static_cast<long long>(matrices.size()));
        sum_all += row_sum;
    }
    for (std::size_t col = 0; col < matrices.size(); ++col) {
        Frac col_sum{0};
        for (std::size_t row = 0; row < grid.cells.size(); ++row) col_sum += grid.cells[row][col];
        grid.col_avg[col] = col_sum / Frac(static_cast<long long>(estimators.size()));
    }
    grid.grand_avg =
        sum_all / Frac(static_cast<long long>(estimators.size() * matrices.size()));
    return grid;
}

long long binomial_capped(int m, int k, long long cap) {
    if (k < 0 || k > m) return 0;
    if (k > m - k) k = m - k;
    unsigned __int128 value = 1;
    for (int i = 1; i <= k; ++i) {
        // C(m-k+1..m-k+i, i) stays integral when multiplied before division
        value = value * static_cast<unsigned>(m - k + i) / static_cast<unsigned>(i);
        if (value > static_cast<unsigned __int128>(cap)) return cap + 1;
    }
    return static_cast<long long>(value);
}

CombinationStats subset_combinations(const VoteMatrix& matrix,
                                     int k,
                                     const std::string& estimator,
                                     const LabelMap& gold,
                                     const FitConfig& config,
                                     long long max_combinations,
                                     const EstimatorRegistry& registry) {
    const int m = static_cast<int>(matrix.source_count());
    if (k < 1 || k > m)
        throw InvalidArgument("subset size " + std::to_string(k) + " out of range [1, " +
                              std::to_string(m) + "]");
    const long long count = binomial_capped(m, k, max_combinations);
    if (count > max_combinations)
        throw TooManyCombinations("C(" + std::to_string(m) + ", " + std::to_string(k) +
                                  ") exceeds the cap of " + std::to_string(max_combinations));
    const EstimatorFn fn = registry.get(estimator);

    std::vector<Frac> accuracies;
    accuracies.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> subset(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    while (true) {
        const VoteMatrix sub = matrix.select_sources(subset);
        const PosteriorLabels posteriors = fn(sub, config);
        accuracies.push_back(accuracy_frac(accuracy(harden(posteriors), gold)));

        // next combination in lexicographic order
        int i = k - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] ==
                             static_cast<std::size_t>(m - k + i))
            --i;
        if (i < 0) break;
        ++subset[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
    if (static_cast<long long>(accuracies.size()) != count)
        throw NumericalFailure("subset enumeration produced " +
                               std::to_string(accuracies.size()) + " subsets, expected " +
                               std::to_string(count));
    return {k, count, frac_stats(accuracies)};
}

}  // namespace verdict
