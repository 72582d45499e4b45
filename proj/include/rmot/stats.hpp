#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rmot/types.hpp"

namespace rmot {

struct HistogramBin {
    double lower = 0.0;
    /// Upper edge; +inf for an open-ended last bin.
    double upper = 0.0;
    std::int64_t count = 0;

    friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

struct StatsReport {
    std::int64_t videos = 0;
    std::int64_t frames = 0;
    std::int64_t expressions_total = 0;
    std::int64_t no_target_expressions = 0;
    std::int64_t distinct_expressions = 0;
    double expressions_per_sequence = 0.0;
    std::int64_t instances_total = 0;
    std::int64_t distinct_instances = 0;
    double instances_per_expression = 0.0;
    std::int64_t bbox_total = 0;
    std::int64_t word_vocab = 0;
    double temporal_ratio_mean = 0.0;
    std::vector<HistogramBin> temporal_ratio_histogram;
    std::vector<HistogramBin> frames_per_expression_histogram;

    friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

/// Fraction of the sequence's frames on which the expression has a target.
/// Throws rmot::Error(ZERO_LENGTH_SEQUENCE) when sequence_length < 1.
double temporal_ratio(const ExpressionTask& task, Frame sequence_length);

/// Whitespace runs collapsed to one space, ends trimmed.
std::string normalize_expression_text(std::string_view text);

/// Lowercased tokens with ASCII punctuation removed; empty tokens dropped.
std::vector<std::string> vocabulary_tokens(std::string_view text);

/// Expressions referencing unknown sequences are counted with zero
/// temporal ratio. Histograms use half-open bins with a closed last bin.
StatsReport compute_stats(const Dataset& dataset, unsigned workers = 1);

/// Writes temporal_ratio_histogram.csv and frames_per_expression_histogram.csv
/// (lower,upper,count) into `dir`. Throws rmot::Error(OUTPUT_UNWRITABLE).
void emit_histograms(const StatsReport& report, const std::filesystem::path& dir);

}  // namespace rmot
