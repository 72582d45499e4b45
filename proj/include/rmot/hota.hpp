#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rmot/assignment.hpp"
#include "rmot/types.hpp"

namespace rmot {

/// Matching tallies for one localization threshold. Unit-level values pool
/// by plain summation.
struct AlphaStats {
    double alpha = 0.0;
    std::int64_t tp = 0;
    std::int64_t fn = 0;
    std::int64_t fp = 0;
    /// Sum of IoU over true positives.
    double iou_sum = 0.0;
    /// Sums over true positives c of TPA/(TPA+FNA+FPA), TPA/(TPA+FNA), TPA/(TPA+FPA).
    double ass_a_sum = 0.0;
    double ass_re_sum = 0.0;
    double ass_pr_sum = 0.0;

    friend bool operator==(const AlphaStats&, const AlphaStats&) = default;
};

/// Per-(gt track, predicted track) association record of a unit.
struct PairAssociation {
    TrackId gt;
    TrackId pred;
    std::int64_t tpa = 0;
    std::int64_t fna = 0;
    std::int64_t fpa = 0;

    double score() const { return static_cast<double>(tpa) / static_cast<double>(tpa + fna + fpa); }

    friend bool operator==(const PairAssociation&, const PairAssociation&) = default;
};

struct FrameMatch {
    Frame frame = 0;
    TrackId gt;
    TrackId pred;

    friend auto operator<=>(const FrameMatch&, const FrameMatch&) = default;
};

/// Optional diagnostics filled by match_unit.
struct UnitDetail {
    std::vector<PairAssociation> pairs;  // only pairs with tpa > 0
    std::vector<FrameMatch> matches;     // ordered by frame, then gt row order
};

using MatchSolver = Matching (*)(const WeightMatrix&);

/// Pre-indexed form of one unit: dense track indices, per-frame sparse IoU
/// cells. Built once, reused for every alpha.
class UnitProblem {
public:
    UnitProblem(const ExpressionTask& task, std::span<const Detection> preds);

    std::size_t frame_count() const { return frames_.size(); }
    std::int64_t gt_box_count() const { return gt_boxes_; }
    std::int64_t pred_box_count() const { return pred_boxes_; }

    /// Stats for one alpha in (0,1); throws rmot::Error(INVALID_ALPHA) otherwise.
    AlphaStats match(double alpha, MatchSolver solver = &solve_max_weight, UnitDetail* detail = nullptr) const;

private:
    struct Cell {
        std::uint32_t row;
        std::uint32_t col;
        std::uint32_t pair;
        double iou;
    };
    struct FrameData {
        Frame frame;
        std::vector<std::uint32_t> gt;    // dense gt track index per row
        std::vector<std::uint32_t> pred;  // dense pred track index per column
        std::vector<Cell> cells;          // iou > 0 only, row-major
    };

    std::vector<TrackId> gt_ids_;
    std::vector<TrackId> pred_ids_;
    std::vector<std::int64_t> gt_presence_;
    std::vector<std::int64_t> pred_presence_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;  // (gt, pred) per pair index
    std::vector<FrameData> frames_;
    std::int64_t gt_boxes_ = 0;
    std::int64_t pred_boxes_ = 0;
};

/// Convenience wrapper: one unit, one alpha.
AlphaStats match_unit(const ExpressionTask& task, std::span<const Detection> preds, double alpha,
                      MatchSolver solver = &solve_max_weight, UnitDetail* detail = nullptr);

/// All alphas of a grid for one unit.
std::vector<AlphaStats> evaluate_unit(const UnitProblem& unit, std::span<const double> alphas,
                                      MatchSolver solver = &solve_max_weight);

/// Componentwise sum per alpha, in the given unit order. Throws
/// rmot::Error(ALPHA_GRID_MISMATCH) when the units disagree on the grid.
std::vector<AlphaStats> accumulate(std::span<const std::vector<AlphaStats>> units);

struct AlphaMetrics {
    double alpha = 0.0;
    double hota = 0.0;
    double det_a = 0.0;
    double ass_a = 0.0;
    double det_re = 0.0;
    double det_pr = 0.0;
    double ass_re = 0.0;
    double ass_pr = 0.0;
    double loc_a = 0.0;

    friend bool operator==(const AlphaMetrics&, const AlphaMetrics&) = default;
};

/// Finalized HOTA family. Values are fractions in [0,1]; they are shown
/// as percentages only when reports are written.
struct MetricReport {
    double hota = 0.0;
    double det_a = 0.0;
    double ass_a = 0.0;
    double det_re = 0.0;
    double det_pr = 0.0;
    double ass_re = 0.0;
    double ass_pr = 0.0;
    double loc_a = 0.0;
    /// No ground truth and no surviving predictions anywhere.
    bool empty_eval = false;
    std::vector<AlphaMetrics> per_alpha;
    std::vector<AlphaStats> counts;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

AlphaMetrics finalize_alpha(const AlphaStats& s);

/// Per-alpha ratios, then the arithmetic mean over the grid of every metric.
MetricReport finalize(std::span<const AlphaStats> pooled);

}  // namespace rmot
