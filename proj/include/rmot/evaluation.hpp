#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmot/hota.hpp"
#include "rmot/types.hpp"

namespace rmot {

/// (sequence_id, expression_id)
using UnitKey = std::pair<std::string, std::string>;

/// Raw tracker output per unit. Units absent from the map have no predictions.
using PredictionSet = std::map<UnitKey, std::vector<Detection>>;

enum class Aggregation : std::uint8_t {
    /// Counts summed over all units before ratios are taken (default).
    Pooled,
    /// Per-unit metrics averaged; units with an empty evaluation are skipped.
    Macro,
};

struct EvalOptions {
    Aggregation aggregation = Aggregation::Pooled;
    unsigned workers = 1;
    MatchSolver solver = &solve_max_weight;
    bool with_attributes = true;
};

struct AttributeReport {
    /// Final HOTA per attribute as a fraction; nullopt when no evaluated frame carries it.
    std::array<std::optional<double>, kAttributeCount> hota{};
    std::array<std::optional<MetricReport>, kAttributeCount> detail{};
    std::array<std::int64_t, kAttributeCount> frame_counts{};
    /// Composites over the attributes that are present; nullopt when none is.
    std::optional<double> hota_s;
    std::optional<double> hota_m;
    std::size_t n_s = 0;
    std::size_t n_m = 0;
    std::vector<std::string> warnings;

    friend bool operator==(const AttributeReport&, const AttributeReport&) = default;
};

struct EvaluationSummary {
    std::size_t units = 0;
    std::size_t no_target_units = 0;
    std::int64_t raw_detections = 0;
    std::int64_t retained_detections = 0;

    friend bool operator==(const EvaluationSummary&, const EvaluationSummary&) = default;
};

struct EvaluationResult {
    MetricReport overall;
    std::optional<AttributeReport> attributes;
    EvaluationSummary summary;
    std::vector<std::string> warnings;

    friend bool operator==(const EvaluationResult&, const EvaluationResult&) = default;
};

/// Macro aggregation: per-unit finalize, then the mean over non-empty units.
MetricReport finalize_macro(std::span<const std::vector<AlphaStats>> units);

/// filter -> match -> accumulate -> finalize, plus attribute views and
/// composites when the dataset carries attribute labels. Units are reduced
/// in (sequence_id, expression_id) order, so the result does not depend on
/// expression order or worker count.
EvaluationResult evaluate(const Dataset& dataset, const PredictionSet& predictions, const EvalConfig& cfg,
                          const EvalOptions& options = {});

/// Final HOTA of one attribute view over all units; nullopt when no frame
/// of the evaluated sequences carries the attribute.
std::optional<double> attribute_hota(const Dataset& dataset, const PredictionSet& predictions, Attribute attr,
                                     const EvalConfig& cfg, const EvalOptions& options = {});

}  // namespace rmot
