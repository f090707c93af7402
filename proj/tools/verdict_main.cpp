// verdict: dataset -> sweep -> aggregate -> report pipeline driver.
//
// Exit codes: 0 success, 2 usage error, 3 transport error, 4 data error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "verdict/completion.hpp"
#include "verdict/errors.hpp"
#include "verdict/experiment.hpp"
#include "verdict/io.hpp"
#include "verdict/label_models.hpp"
#include "verdict/prompting.hpp"
#include "verdict/report.hpp"
#include "verdict/run_store.hpp"

namespace fs = std::filesystem;
using namespace verdict;

namespace {

struct CliOptions {
    std::string dataset_path;
    std::string store_path;
    std::string base_url;
    std::string model_name;
    std::string prompt = "reason_then_answer";
    std::vector<double> temperatures;
    int runs = 10;
    int max_parallel = 4;
    int retry_attempts = 5;
    int retry_backoff_ms = 1000;
    bool replay = false;
    std::string out_dir = "out";
    std::string dest_dir;  // report destination; defaults to out_dir
    std::vector<std::string> estimators = {"majority", "flyingsquid", "dawid_skene",
                                           "generative"};
    int max_iterations = 500;
    double tolerance = 1e-6;
    std::uint64_t seed = 0;
    double step_size = 0.05;
    double class_balance = 0.5;
    double combo_temperature = 0.5;
    std::string combo_estimator = "generative";
    std::vector<int> combo_sizes = {3, 4, 5, 6, 7, 8, 9};
    long long max_combinations = kDefaultCombinationCap;
};

void require_flag(bool ok, const std::string& message) {
    if (!ok) throw InvalidArgument(message);
}

FitConfig fit_config(const CliOptions& opt) {
    return {opt.max_iterations, opt.tolerance, opt.seed, opt.step_size};
}

EstimatorRegistry make_registry(const CliOptions& opt) {
    EstimatorRegistry reg = EstimatorRegistry::builtin();
    if (opt.class_balance != 0.5) {
        const double balance = opt.class_balance;
        reg.add("generative", [balance](const VoteMatrix& m, const FitConfig& cfg) {
            return fit_generative_model(m, cfg, balance).posteriors;
        });
    }
    return reg;
}

std::string out_path(const CliOptions& opt, const std::string& name) {
    return (fs::path(opt.out_dir) / name).string();
}

std::string votes_csv_name(double temperature) {
    return "votes_t" + format_temperature(temperature) + ".csv";
}

// ---------------------------------------------------------------- sweep ---

int cmd_sweep(const CliOptions& opt) {
    require_flag(!opt.dataset_path.empty(), "--dataset is required for sweep");
    require_flag(!opt.store_path.empty(), "--store is required for sweep");
    require_flag(!opt.model_name.empty(), "--model is required for sweep");
    require_flag(opt.replay || !opt.base_url.empty(),
                 "--base-url is required for sweep unless --replay is set");

    const auto dataset = load_dataset(opt.dataset_path);
    RunConfig config;
    config.temperatures = opt.temperatures;
    config.runs_per_temperature = opt.runs;
    config.prompt_type = prompt_type_from_name(opt.prompt);
    config.model_name = opt.model_name;
    config.max_parallel_requests = opt.max_parallel;
    config.retry = {opt.retry_attempts, opt.retry_backoff_ms, 2.0};

    RunStore store(opt.store_path);
    std::unique_ptr<HttpCompleter> http;
    Completer* completer = nullptr;
    if (!opt.replay) {
        http = std::make_unique<HttpCompleter>(opt.base_url, opt.model_name, config.retry);
        completer = http.get();
    }
    const SweepSummary summary = sweep(dataset, config, store, completer);
    std::cout << "sweep: " << summary.total << " tasks, " << summary.cached << " cached, "
              << summary.fetched << " fetched -> " << opt.store_path << "\n";
    return 0;
}

// ------------------------------------------------------------ aggregate ---

int cmd_aggregate(const CliOptions& opt) {
    require_flag(!opt.dataset_path.empty(), "--dataset is required for aggregate");
    require_flag(!opt.store_path.empty(), "--store is required for aggregate");
    require_flag(!opt.model_name.empty(), "--model is required for aggregate");

    const auto dataset = load_dataset(opt.dataset_path);
    const LabelMap gold = gold_labels(dataset);
    const PromptType prompt = prompt_type_from_name(opt.prompt);
    RunStore store(opt.store_path);
    const EstimatorRegistry registry = make_registry(opt);
    const FitConfig config = fit_config(opt);

    // Resolve every estimator before any work starts.
    for (const auto& name : opt.estimators) registry.get(name);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + opt.out_dir + "': " + ec.message());

    const auto matrices =
        votes_by_temperature(store, dataset, opt.model_name, prompt, opt.temperatures);
    int files = 0;
    for (const auto& [t, matrix] : matrices) {
        save_votes_csv(matrix, out_path(opt, votes_csv_name(t)));
        ++files;
    }

    // Per-run accuracies.
    std::string run_csv = "temperature,source_id,correct,total,accuracy_percent\n";
    for (const auto& row :
         per_run_accuracies(store, dataset, opt.model_name, prompt, opt.temperatures)) {
        run_csv += format_temperature(row.temperature) + "," + csv_escape(row.source_id) + "," +
                   std::to_string(row.result.correct) + "," + std::to_string(row.result.total) +
                   "," + row.result.accuracy_str() + "\n";
    }
    write_file(out_path(opt, "run_accuracy.csv"), run_csv);
    ++files;

    // Consolidated accuracies, posteriors and fitted params per estimator.
    std::string acc_csv = "estimator,temperature,correct,total,accuracy_percent\n";
    for (const auto& name : opt.estimators) {
        for (const auto& [t, matrix] : matrices) {
            const std::string suffix = name + "_t" + format_temperature(t) + ".csv";
            PosteriorLabels posteriors;
            if (name == "majority") {
                posteriors = majority_vote(matrix);
            } else if (name == "flyingsquid") {
                const SourceParams params = estimate_triplet_accuracies(matrix);
                save_source_params_csv(params, out_path(opt, "params_" + suffix));
                ++files;
                posteriors = posterior_naive_bayes(matrix, params);
            } else if (name == "dawid_skene") {
                const DawidSkeneResult result = fit_dawid_skene(matrix, config);
                save_confusion_params_csv(result.params, out_path(opt, "params_" + suffix));
                ++files;
                posteriors = result.posteriors;
            } else if (name == "generative") {
                const GenerativeResult result =
                    fit_generative_model(matrix, config, opt.class_balance);
                save_source_params_csv(result.params, out_path(opt, "params_" + suffix));
                ++files;
                posteriors = result.posteriors;
            } else {
                posteriors = registry.get(name)(matrix, config);
            }
            save_posteriors_csv(posteriors, out_path(opt, "posteriors_" + suffix));
            ++files;
            const EvaluationResult result = accuracy(harden(posteriors), gold);
            acc_csv += csv_escape(name) + "," + format_temperature(t) + "," +
                       std::to_string(result.correct) + "," + std::to_string(result.total) + "," +
                       result.accuracy_str() + "\n";
        }
    }
    write_file(out_path(opt, "accuracy.csv"), acc_csv);
    ++files;

    std::cout << "aggregate: wrote " << files << " files to " << opt.out_dir << "\n";
    return 0;
}

// --------------------------------------------------------------- report ---

std::vector<std::vector<std::string>> load_csv_rows(const std::string& path,
                                                    const std::string& expected_header,
                                                    std::size_t fields) {
    const std::string content = read_file(path);
    std::vector<std::vector<std::string>> rows;
    std::size_t start = 0;
    int line_no = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        const std::string line = content.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != expected_header)
                throw ParseFailure(path + ": expected header '" + expected_header + "', got '" +
                                   line + "'");
            continue;
        }
        auto cells = csv_split(line);
        if (cells.size() != fields)
            throw ParseFailure(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(fields) + " fields");
        rows.push_back(std::move(cells));
    }
    return rows;
}

long long parse_count(const std::string& text, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long long value = std::stoll(text, &pos);
        if (pos != text.size() || value < 0) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ParseFailure(where + ": bad count '" + text + "'");
    }
}

double parse_real(const std::string& text, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double value = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ParseFailure(where + ": bad number '" + text + "'");
    }
}

int cmd_report(const CliOptions& opt) {
    require_flag(!opt.dataset_path.empty(), "--dataset is required for report");
    require_flag(!opt.store_path.empty(), "--store is required for report");
    require_flag(!opt.model_name.empty(), "--model is required for report");
    const std::string dest = opt.dest_dir.empty() ? opt.out_dir : opt.dest_dir;

    const std::string run_acc_path = out_path(opt, "run_accuracy.csv");
    const std::string acc_path = out_path(opt, "accuracy.csv");
    const std::string combo_votes_path = out_path(opt, votes_csv_name(opt.combo_temperature));

    std::vector<std::string> missing;
    for (const auto& p : {opt.dataset_path, opt.store_path, run_acc_path, acc_path})
        if (!fs::exists(p)) missing.push_back(p);
    if (!opt.combo_sizes.empty() && !fs::exists(combo_votes_path))
        missing.push_back(combo_votes_path);
    if (!missing.empty()) {
        std::string joined;
        for (const auto& p : missing) joined += (joined.empty() ? "" : ", ") + p;
        throw IoError("missing report inputs: " + joined);
    }

    const auto dataset = load_dataset(opt.dataset_path);
    const LabelMap gold = gold_labels(dataset);

    // Table 2 rows from per-run accuracy counts (exact fractions).
    std::vector<std::pair<double, std::vector<Frac>>> by_temperature;
    for (const auto& row : load_csv_rows(
             run_acc_path, "temperature,source_id,correct,total,accuracy_percent", 5)) {
        const double t = parse_real(row[0], run_acc_path);
        const Frac acc(parse_count(row[2], run_acc_path), parse_count(row[3], run_acc_path));
        if (by_temperature.empty() ||
            format_temperature(by_temperature.back().first) != format_temperature(t))
            by_temperature.push_back({t, {}});
        by_temperature.back().second.push_back(acc);
    }
    const RunStatsTable stats = run_stats(by_temperature);

    // Grid from consolidated accuracy counts.
    GridResult grid;
    std::vector<std::vector<Frac>> cell_rows;
    for (const auto& row : load_csv_rows(
             acc_path, "estimator,temperature,correct,total,accuracy_percent", 5)) {
        const std::string& estimator = row[0];
        const double t = parse_real(row[1], acc_path);
        const Frac acc(parse_count(row[2], acc_path), parse_count(row[3], acc_path));
        if (grid.estimators.empty() || grid.estimators.back() != estimator) {
            grid.estimators.push_back(estimator);
            grid.cells.emplace_back();
        }
        if (grid.estimators.size() == 1) grid.temperatures.push_back(t);
        grid.cells.back().push_back(acc);
    }
    for (const auto& row : grid.cells)
        if (row.size() != grid.temperatures.size())
            throw ParseFailure(acc_path + ": ragged estimator/temperature grid");
    if (!grid.cells.empty()) {
        grid.row_avg.assign(grid.estimators.size(), Frac{0});
        grid.col_avg.assign(grid.temperatures.size(), Frac{0});
        Frac sum_all{0};
        for (std::size_t r = 0; r < grid.cells.size(); ++r) {
            Frac row_sum{0};
            for (Frac c : grid.cells[r]) row_sum += c;
            grid.row_avg[r] = row_sum / Frac(static_cast<long long>(grid.temperatures.size()));
            sum_all += row_sum;
        }
        for (std::size_t c = 0; c < grid.temperatures.size(); ++c) {
            Frac col_sum{0};
            for (std::size_t r = 0; r < grid.cells.size(); ++r) col_sum += grid.cells[r][c];
            grid.col_avg[c] = col_sum / Frac(static_cast<long long>(grid.estimators.size()));
        }
        grid.grand_avg = sum_all / Frac(static_cast<long long>(grid.estimators.size() *
                                                               grid.temperatures.size()));
    }

    // Combination study on the stored votes at the chosen temperature.
    ReportMeta meta;
    std::vector<CombinationStats> combos;
    if (!opt.combo_sizes.empty()) {
        const VoteMatrix matrix = load_votes_csv(combo_votes_path);
        const EstimatorRegistry registry = make_registry(opt);
        const FitConfig config = fit_config(opt);
        for (int k : opt.combo_sizes)
            combos.push_back(subset_combinations(matrix, k, opt.combo_estimator, gold, config,
                                                 opt.max_combinations, registry));
        for (const auto& source : validate_matrix(matrix).sources) {
            if (source.flagged) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "%.3f", source.coverage);
                meta.notes.push_back("source " + source.source_id + " flagged at temperature " +
                                     format_temperature(opt.combo_temperature) + ": coverage " +
                                     buf);
            }
        }
    }

    meta.model_name = opt.model_name;
    meta.prompt_type = opt.prompt;
    meta.estimators = grid.estimators;
    meta.config = fit_config(opt);
    meta.class_balance = opt.class_balance;
    meta.combo_temperature = opt.combo_temperature;
    meta.combo_estimator = opt.combo_estimator;
    meta.dataset_fingerprint = file_fingerprint(opt.dataset_path);
    meta.store_fingerprint = file_fingerprint(opt.store_path);

    emit_report(stats, grid, combos, meta, dest);
    std::cout << "report: wrote report.md, table2.csv, table3.csv, table4.csv to " << dest << "\n";
    return 0;
}

// -------------------------------------------------------------- validate ---

int cmd_validate(const CliOptions& opt) {
    require_flag(!opt.dataset_path.empty(), "--dataset is required for validate");
    require_flag(!opt.store_path.empty(), "--store is required for validate");

    const auto dataset = load_dataset(opt.dataset_path);
    std::size_t with_gold = 0;
    for (const auto& ex : dataset)
        if (ex.gold) ++with_gold;
    std::cout << "dataset: " << dataset.size() << " examples, " << with_gold << " with gold\n";

    RunStore store(opt.store_path);
    std::cout << "store: " << store.size() << " records\n";

    std::map<std::string, const EntailmentExample*> by_id;
    for (const auto& ex : dataset) by_id[ex.id] = &ex;

    std::size_t foreign = 0;
    std::vector<std::string> bad_keys;
    // group key: model \x1f prompt \x1f temperature
    std::map<std::string, std::vector<RunRecord>> groups;
    for (const auto& rec : store.list()) {
        auto it = by_id.find(rec.example_id);
        if (it == by_id.end()) {
            ++foreign;
            continue;
        }
        const PromptType prompt = prompt_type_from_name(rec.prompt_type);
        const std::string expected =
            make_run_key(rec.model_name, prompt, rec.temperature, rec.run_index, rec.example_id,
                         render_prompt(*it->second, prompt));
        if (expected != rec.run_key && bad_keys.size() < 5) bad_keys.push_back(rec.run_key);
        groups[rec.model_name + '\x1f' + rec.prompt_type + '\x1f' +
               format_temperature(rec.temperature)]
            .push_back(rec);
    }

    for (const auto& [key, records] : groups) {
        const auto sep1 = key.find('\x1f');
        const auto sep2 = key.find('\x1f', sep1 + 1);
        const VoteMatrix matrix =
            build_vote_matrix(records, [](const RunRecord& rec) -> std::optional<std::string> {
                return "run" + std::to_string(rec.run_index);
            });
        const MatrixDiagnostics diag = validate_matrix(matrix);
        std::size_t flagged = 0;
        for (const auto& s : diag.sources)
            if (s.flagged) ++flagged;
        char abstain[32];
        std::snprintf(abstain, sizeof(abstain), "%.3f", diag.abstain_rate);
        std::cout << "group model=" << key.substr(0, sep1) << " prompt="
                  << key.substr(sep1 + 1, sep2 - sep1 - 1) << " t=" << key.substr(sep2 + 1)
                  << ": items=" << diag.item_count << " sources=" << diag.source_count
                  << " abstain_rate=" << abstain << " flagged_sources=" << flagged << "\n";
    }
    if (foreign > 0)
        std::cout << "note: " << foreign << " records reference examples outside the dataset\n";
    if (!bad_keys.empty()) {
        std::string joined;
        for (const auto& k : bad_keys) joined += (joined.empty() ? "" : ", ") + k;
        throw ParseFailure("store keys inconsistent with recorded identity (first " +
                           std::to_string(bad_keys.size()) + "): " + joined);
    }
    std::cout << "validate: ok\n";
    return 0;
}

int dispatch(const CLI::App& app, const CliOptions& opt) {
    try {
        if (app.got_subcommand("sweep")) return cmd_sweep(opt);
        if (app.got_subcommand("aggregate")) return cmd_aggregate(opt);
        if (app.got_subcommand("report")) return cmd_report(opt);
        if (app.got_subcommand("validate")) return cmd_validate(opt);
        std::cerr << "verdict: no subcommand given\n";
        return 2;
    } catch (const TransportError& e) {
        std::cerr << "verdict: transport error: " << e.what() << "\n";
        return 3;
    } catch (const InvalidArgument& e) {
        std::cerr << "verdict: " << e.what() << "\n";
        return 2;
    } catch (const UnknownModel& e) {
        std::cerr << "verdict: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "verdict: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "verdict: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CliOptions opt;
    for (int i = 1; i <= 10; ++i) opt.temperatures.push_back(i / 10.0);

    CLI::App app{"consolidate repeated noisy yes/no answers into high-accuracy predictions"};
    app.set_config("--config", "", "key=value config file; command-line flags take precedence");
    app.option_defaults()->always_capture_default();

    app.add_option("--dataset", opt.dataset_path, "entailment dataset (JSON lines)");
    app.add_option("--store", opt.store_path, "run-record store (JSON lines, append-only)");
    app.add_option("--base-url", opt.base_url, "chat-completions endpoint base URL");
    app.add_option("--model", opt.model_name, "model name sent with each request");
    app.add_option("--prompt", opt.prompt,
                   "prompt type: answer_only | answer_then_explain | reason_then_answer");
    app.add_option("--temperatures", opt.temperatures, "temperatures to sweep")
        ->delimiter(',');
    app.add_option("--runs", opt.runs, "runs per temperature");
    app.add_option("--max-parallel", opt.max_parallel, "max in-flight completions");
    app.add_option("--retry-attempts", opt.retry_attempts, "max attempts per completion");
    app.add_option("--retry-backoff-ms", opt.retry_backoff_ms, "initial retry backoff");
    app.add_flag("--replay", opt.replay, "serve strictly from the store; missing keys fail");
    app.add_option("--out", opt.out_dir, "aggregate output directory");
    app.add_option("--dest", opt.dest_dir, "report destination (default: --out)");
    app.add_option("--estimators", opt.estimators,
                   "estimators: majority | flyingsquid | dawid_skene | generative")
        ->delimiter(',');
    app.add_option("--max-iterations", opt.max_iterations, "fit iteration cap");
    app.add_option("--tolerance", opt.tolerance, "fit convergence tolerance");
    app.add_option("--seed", opt.seed, "seed recorded with fits");
    app.add_option("--step-size", opt.step_size, "generative gradient step size");
    app.add_option("--class-balance", opt.class_balance,
                   "positive-class prior for the generative estimator");
    app.add_option("--combo-temperature", opt.combo_temperature,
                   "temperature whose votes feed the combination study");
    app.add_option("--combo-estimator", opt.combo_estimator,
                   "estimator used for the combination study");
    app.add_option("--combo-sizes", opt.combo_sizes,
                   "subset sizes for the combination study (empty to skip)")
        ->delimiter(',');
    app.add_option("--max-combinations", opt.max_combinations,
                   "cap on C(m,k) per combination row");

    // fallthrough lets the shared options above appear after the subcommand,
    // so both "verdict sweep --dataset d" and "verdict --dataset d sweep" work
    app.add_subcommand("sweep", "ensure one stored completion per (example, temperature, run)")
        ->fallthrough();
    app.add_subcommand("aggregate", "build vote matrices, fit estimators, write CSVs")
        ->fallthrough();
    app.add_subcommand("report", "render report.md and table2/3/4.csv from aggregate outputs")
        ->fallthrough();
    app.add_subcommand("validate", "check dataset/store integrity and print diagnostics")
        ->fallthrough();
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return dispatch(app, opt);
}
