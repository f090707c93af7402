#include "verdict/report.hpp"

#include <cstdio>
#include <filesystem>

#include "verdict/errors.hpp"
#include "verdict/io.hpp"
#include "verdict/prompting.hpp"

namespace verdict {

namespace {

std::string pct(Frac f) { return format_hundredths(frac_percent_hundredths(f)); }

std::string real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

std::string md_row(const std::vector<std::string>& cells) {
    return "| " + join(cells, " | ") + " |\n";
}

std::string md_divider(std::size_t n) {
    std::vector<std::string> cells(n, "---");
    return md_row(cells);
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::vector<std::string> escaped;
    escaped.reserve(cells.size());
    for (const auto& c : cells) escaped.push_back(csv_escape(c));
    return join(escaped, ",") + "\n";
}

const std::vector<std::string> kStatsHeader = {"max", "min", "max_minus_min", "avg", "median"};

std::vector<std::string> stats_cells(const FracStats& s) {
    return {pct(s.max), pct(s.min), pct(s.max_minus_min), pct(s.avg), pct(s.median)};
}

}  // namespace

void emit_report(const RunStatsTable& stats,
                 const GridResult& grid,
                 const std::vector<CombinationStats>& combos,
                 const ReportMeta& meta,
                 const std::string& destination_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(destination_dir, ec);
    if (ec) throw IoError("cannot create report directory '" + destination_dir + "': " + ec.message());

    std::vector<std::string> notes = meta.notes;
    if (stats.empty()) notes.push_back("run-accuracy section omitted: no per-run statistics");
    if (grid.estimators.empty() || grid.temperatures.empty())
        notes.push_back("label-model grid omitted: no grid cells");
    if (combos.empty()) notes.push_back("combination study omitted: no subset results");

    // --- table2.csv: per-run accuracy stats by temperature ---
    std::string t2 = csv_row({"temperature", "max", "min", "max_minus_min", "avg", "median"});
    for (const auto& row : stats) {
        std::vector<std::string> cells = {real(row.temperature)};
        for (auto& c : stats_cells(row.stats)) cells.push_back(c);
        t2 += csv_row(cells);
    }

    // --- table3.csv: estimator x temperature grid ---
    std::vector<std::string> grid_header = {"estimator"};
    for (double t : grid.temperatures) grid_header.push_back(real(t));
    grid_header.push_back("avg");
    std::string t3 = csv_row(grid_header);
    for (std::size_t row = 0; row < grid.estimators.size(); ++row) {
        std::vector<std::string> cells = {grid.estimators[row]};
        for (Frac c : grid.cells[row]) cells.push_back(pct(c));
        cells.push_back(pct(grid.row_avg[row]));
        t3 += csv_row(cells);
    }
    if (!grid.estimators.empty() && !grid.temperatures.empty()) {
        std::vector<std::string> cells = {"AVG"};
        for (Frac c : grid.col_avg) cells.push_back(pct(c));
        cells.push_back(pct(grid.grand_avg));
        t3 += csv_row(cells);
    }

    // --- table4.csv: subset-combination study ---
    std::string t4 =
        csv_row({"k", "combinations", "max", "min", "max_minus_min", "avg", "median"});
    for (const auto& row : combos) {
        std::vector<std::string> cells = {std::to_string(row.k), std::to_string(row.combinations)};
        for (auto& c : stats_cells(row.stats)) cells.push_back(c);
        t4 += csv_row(cells);
    }

    // --- report.md ---
    std::string md = "# Consolidation report\n\n";
    md += "- model: " + meta.model_name + "\n";
    md += "- prompt type: " + meta.prompt_type + "\n";
    md += "- estimators: " + join(meta.estimators, ", ") + "\n";
    md += "- fit config: max_iterations=" + std::to_string(meta.config.max_iterations) +
          ", tolerance=" + real(meta.config.tolerance) +
          ", seed=" + std::to_string(meta.config.seed) +
          ", step_size=" + real(meta.config.step_size) + "\n";
    md += "- class balance: " + real(meta.class_balance) + "\n";
    md += "- combination study: temperature " + real(meta.combo_temperature) + ", estimator " +
          meta.combo_estimator + "\n";
    if (!meta.dataset_fingerprint.empty())
        md += "- dataset fingerprint: " + meta.dataset_fingerprint + "\n";
    if (!meta.store_fingerprint.empty())
        md += "- store fingerprint: " + meta.store_fingerprint + "\n";
    for (const auto& note : notes) md += "- note: " + note + "\n";

    if (!stats.empty()) {
        md += "\n## Run accuracy by temperature\n\n";
        std::vector<std::string> header = {"temperature"};
        for (auto& h : kStatsHeader) header.push_back(h);
        md += md_row(header) + md_divider(header.size());
        for (const auto& row : stats) {
            std::vector<std::string> cells = {real(row.temperature)};
            for (auto& c : stats_cells(row.stats)) cells.push_back(c);
            md += md_row(cells);
        }
    }

    if (!grid.estimators.empty() && !grid.temperatures.empty()) {
        md += "\n## Label model accuracy by temperature\n\n";
        md += md_row(grid_header) + md_divider(grid_header.size());
        for (std::size_t row = 0; row < grid.estimators.size(); ++row) {
            std::vector<std::string> cells = {grid.estimators[row]};
            for (Frac c : grid.cells[row]) cells.push_back(pct(c));
            cells.push_back(pct(grid.row_avg[row]));
            md += md_row(cells);
        }
        std::vector<std::string> cells = {"AVG"};
        for (Frac c : grid.col_avg) cells.push_back(pct(c));
        cells.push_back(pct(grid.grand_avg));
        md += md_row(cells);
    }

    if (!combos.empty()) {
        md += "\n## Combination study\n\n";
        std::vector<std::string> header = {"k", "combinations"};
        for (auto& h : kStatsHeader) header.push_back(h);
        md += md_row(header) + md_divider(header.size());
        for (const auto& row : combos) {
            std::vector<std::string> cells = {std::to_string(row.k),
                                              std::to_string(row.combinations)};
            for (auto& c : stats_cells(row.stats)) cells.push_back(c);
            md += md_row(cells);
        }
    }

    const fs::path dir(destination_dir);
    write_file((dir / "table2.csv").string(), t2);
    write_file((dir / "table3.csv").string(), t3);
    write_file((dir / "table4.csv").string(), t4);
    write_file((dir / "report.md").string(), md);
}

}  // namespace verdict
