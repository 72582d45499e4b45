#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rmot/evaluation.hpp"
#include "rmot/stats.hpp"

namespace rmot::report {

/// Fraction -> percentage string with two decimals, half away from zero
/// (0.275349 -> "27.53").
std::string display_percent(double fraction);

/// Everything a report file carries. Values stay fractions at full precision.
struct ReportDocument {
    std::optional<EvalConfig> config;
    Aggregation aggregation = Aggregation::Pooled;
    std::optional<EvaluationResult> evaluation;
    std::optional<StatsReport> stats;

    friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

/// Machine-readable JSON. Each metric is stored as {"value": <fraction>,
/// "display": "<percent>"}; doubles are written with round-trip precision.
std::string to_json(const ReportDocument& doc);
ReportDocument from_json(const std::string& text);

/// Human-readable table, columns HOTA DetA AssA HOTA_S HOTA_M LocA then
/// DetRe DetPr AssRe AssPr, followed by per-attribute HOTA.
std::string to_table(const ReportDocument& doc);

/// Writes report.json and report.txt into `dir`. Throws rmot::Error(OUTPUT_UNWRITABLE).
void write_report(const ReportDocument& doc, const std::filesystem::path& dir);
ReportDocument read_report(const std::filesystem::path& json_path);

}  // namespace rmot::report
