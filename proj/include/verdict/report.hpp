#pragma once
// Renders the experiment outputs as report.md plus table2/3/4.csv with
// byte-deterministic content: no timestamps, all numbers formatted from
// exact integer hundredths.

#include <string>
#include <vector>

#include "verdict/experiment.hpp"

namespace verdict {

struct ReportMeta {
    std::string model_name;
    std::string prompt_type;
    std::vector<std::string> estimators;
    FitConfig config;
    double class_balance = 0.5;
    double combo_temperature = 0.5;
    std::string combo_estimator = "generative";
    std::string dataset_fingerprint;
    std::string store_fingerprint;
    std::vector<std::string> notes;  // e.g. flagged low-coverage sources
};

// Writes report.md, table2.csv, table3.csv and table4.csv into
// destination_dir (created if missing). Empty inputs drop the matching
// report.md section, leave the CSV header-only, and add a header note.
// Unwritable destination -> IoError.
void emit_report(const RunStatsTable& stats,
                 const GridResult& grid,
                 const std::vector<CombinationStats>& combos,
                 const ReportMeta& meta,
                 const std::string& destination_dir);

}  // namespace verdict
