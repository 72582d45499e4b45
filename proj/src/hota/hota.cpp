#include "rmot/hota.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <tuple>
#include <unordered_map>

#include "rmot/error.hpp"
#include "rmot/geometry.hpp"

namespace rmot {
namespace {

struct IndexedBox {
    BoundingBox box;
    TrackId track;
};

bool geometry_less(const IndexedBox& a, const IndexedBox& b) {
    return std::tie(a.box.x, a.box.y, a.box.w, a.box.h, a.track) <
           std::tie(b.box.x, b.box.y, b.box.w, b.box.h, b.track);
}

std::uint32_t dense_index(const std::vector<TrackId>& ids, TrackId id) {
    return static_cast<std::uint32_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
}

}  // namespace

UnitProblem::UnitProblem(const ExpressionTask& task, std::span<const Detection> preds) {
    std::map<Frame, std::pair<std::vector<IndexedBox>, std::vector<IndexedBox>>> by_frame;
    for (const auto& [frame, targets] : task.targets) {
        if (targets.empty()) continue;
        auto& slot = by_frame[frame].first;
        for (const auto& [track, box] : targets) {
            slot.push_back({box, track});
            gt_ids_.push_back(track);
        }
    }
    for (const Detection& d : preds) {
        by_frame[d.frame].second.push_back({d.box, d.track_id});
        pred_ids_.push_back(d.track_id);
    }
    for (auto* ids : {&gt_ids_, &pred_ids_}) {
        std::sort(ids->begin(), ids->end());
        ids->erase(std::unique(ids->begin(), ids->end()), ids->end());
    }
    gt_presence_.assign(gt_ids_.size(), 0);
    pred_presence_.assign(pred_ids_.size(), 0);

    std::unordered_map<std::uint64_t, std::uint32_t> pair_index;
    const std::uint64_t stride = pred_ids_.size();
    frames_.reserve(by_frame.size());
    for (auto& [frame, boxes] : by_frame) {
        auto& [gts, prs] = boxes;
        std::sort(gts.begin(), gts.end(), geometry_less);
        std::sort(prs.begin(), prs.end(), geometry_less);

        FrameData fd{frame, {}, {}, {}};
        fd.gt.reserve(gts.size());
        fd.pred.reserve(prs.size());
        for (const auto& g : gts) {
            const auto gi = dense_index(gt_ids_, g.track);
            fd.gt.push_back(gi);
            ++gt_presence_[gi];
        }
        for (const auto& p : prs) {
            const auto pi = dense_index(pred_ids_, p.track);
            fd.pred.push_back(pi);
            ++pred_presence_[pi];
        }
        for (std::uint32_t r = 0; r < gts.size(); ++r) {
            for (std::uint32_t c = 0; c < prs.size(); ++c) {
                const double v = iou(gts[r].box, prs[c].box);
                if (!(v > 0.0)) continue;
                const std::uint64_t key = fd.gt[r] * stride + fd.pred[c];
                const auto [it, inserted] = pair_index.try_emplace(key, static_cast<std::uint32_t>(pairs_.size()));
                if (inserted) pairs_.emplace_back(fd.gt[r], fd.pred[c]);
                fd.cells.push_back({r, c, it->second, v});
            }
        }
        gt_boxes_ += static_cast<std::int64_t>(gts.size());
        pred_boxes_ += static_cast<std::int64_t>(prs.size());
        frames_.push_back(std::move(fd));
    }
}

AlphaStats UnitProblem::match(double alpha, MatchSolver solver, UnitDetail* detail) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("INVALID_ALPHA", fmt::format("alpha {} outside (0,1)", alpha));

    AlphaStats s;
    s.alpha = alpha;

    // Pass 1: co-occurrence above alpha and the prior association score.
    std::vector<std::int64_t> co(pairs_.size(), 0);
    for (const FrameData& fd : frames_) {
        for (const Cell& cell : fd.cells) {
            if (cell.iou >= alpha) ++co[cell.pair];
        }
    }
    std::vector<double> prior(pairs_.size(), 0.0);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        if (co[k] == 0) continue;
        const auto [g, p] = pairs_[k];
        prior[k] = static_cast<double>(co[k]) /
                   static_cast<double>(gt_presence_[g] + pred_presence_[p] - co[k]);
    }

    // Pass 2: per-frame maximum-weight matching.
    const double tie_scale = 1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(frames_.size(), 1)));
    std::vector<std::int64_t> tpa(pairs_.size(), 0);
    std::vector<std::int32_t> cell_at;
    for (const FrameData& fd : frames_) {
        const std::size_t rows = fd.gt.size();
        const std::size_t cols = fd.pred.size();
        bool any = false;
        for (const Cell& cell : fd.cells) {
            if (cell.iou >= alpha) {
                any = true;
                break;
            }
        }
        if (!any) {
            s.fn += static_cast<std::int64_t>(rows);
            s.fp += static_cast<std::int64_t>(cols);
            continue;
        }

        WeightMatrix m(rows, cols);
        cell_at.assign(rows * cols, -1);
        for (std::size_t i = 0; i < fd.cells.size(); ++i) {
            const Cell& cell = fd.cells[i];
            if (cell.iou < alpha) continue;
            m.set(cell.row, cell.col, prior[cell.pair] + cell.iou * tie_scale);
            cell_at[cell.row * cols + cell.col] = static_cast<std::int32_t>(i);
        }
        const Matching matching = solver(m);
        for (const auto& [r, c] : matching.pairs) {
            const Cell& cell = fd.cells[static_cast<std::size_t>(cell_at[r * cols + c])];
            ++s.tp;
            s.iou_sum += cell.iou;
            ++tpa[cell.pair];
            if (detail) detail->matches.push_back({fd.frame, gt_ids_[fd.gt[r]], pred_ids_[fd.pred[c]]});
        }
        const auto matched = static_cast<std::int64_t>(matching.pairs.size());
        s.fn += static_cast<std::int64_t>(rows) - matched;
        s.fp += static_cast<std::int64_t>(cols) - matched;
    }

    // Pass 3: association scores of the final matches. Each true positive of
    // pair (g, p) contributes the same term, hence the tpa weighting.
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        if (tpa[k] == 0) continue;
        const auto [g, p] = pairs_[k];
        const double t = static_cast<double>(tpa[k]);
        const double gn = static_cast<double>(gt_presence_[g]);
        const double pn = static_cast<double>(pred_presence_[p]);
        s.ass_a_sum += t * (t / (gn + pn - t));
        s.ass_re_sum += t * (t / gn);
        s.ass_pr_sum += t * (t / pn);
        if (detail) {
            detail->pairs.push_back({gt_ids_[g], pred_ids_[p], tpa[k], gt_presence_[g] - tpa[k],
                                     pred_presence_[p] - tpa[k]});
        }
    }
    return s;
}

AlphaStats match_unit(const ExpressionTask& task, std::span<const Detection> preds, double alpha, MatchSolver solver,
                      UnitDetail* detail) {
    return UnitProblem(task, preds).match(alpha, solver, detail);
}

std::vector<AlphaStats> evaluate_unit(const UnitProblem& unit, std::span<const double> alphas, MatchSolver solver) {
    std::vector<AlphaStats> out;
    out.reserve(alphas.size());
    for (double a : alphas) out.push_back(unit.match(a, solver));
    return out;
}

std::vector<AlphaStats> accumulate(std::span<const std::vector<AlphaStats>> units) {
    if (units.empty()) return {};
    std::vector<AlphaStats> pooled(units.front().size());
    for (std::size_t i = 0; i < pooled.size(); ++i) pooled[i].alpha = units.front()[i].alpha;

    for (const auto& unit : units) {
        if (unit.size() != pooled.size()) throw Error("ALPHA_GRID_MISMATCH", "units were evaluated on different alpha grids");
        for (std::size_t i = 0; i < pooled.size(); ++i) {
            const AlphaStats& s = unit[i];
            AlphaStats& acc = pooled[i];
            if (s.alpha != acc.alpha) throw Error("ALPHA_GRID_MISMATCH", fmt::format("alpha {} vs {}", s.alpha, acc.alpha));
            acc.tp += s.tp;
            acc.fn += s.fn;
            acc.fp += s.fp;
            acc.iou_sum += s.iou_sum;
            acc.ass_a_sum += s.ass_a_sum;
            acc.ass_re_sum += s.ass_re_sum;
            acc.ass_pr_sum += s.ass_pr_sum;
        }
    }
    return pooled;
}

AlphaMetrics finalize_alpha(const AlphaStats& s) {
    AlphaMetrics m;
    m.alpha = s.alpha;
    if (s.tp + s.fn + s.fp == 0) {
        m.hota = m.det_a = m.ass_a = m.det_re = m.det_pr = m.ass_re = m.ass_pr = m.loc_a = 1.0;
        return m;
    }
    if (s.tp == 0) return m;

    const double tp = static_cast<double>(s.tp);
    m.det_a = tp / static_cast<double>(s.tp + s.fn + s.fp);
    m.det_re = tp / static_cast<double>(s.tp + s.fn);
    m.det_pr = tp / static_cast<double>(s.tp + s.fp);
    m.ass_a = s.ass_a_sum / tp;
    m.ass_re = s.ass_re_sum / tp;
    m.ass_pr = s.ass_pr_sum / tp;
    m.loc_a = s.iou_sum / tp;
    m.hota = std::sqrt(m.det_a * m.ass_a);
    return m;
}

MetricReport finalize(std::span<const AlphaStats> pooled) {
    MetricReport r;
    r.counts.assign(pooled.begin(), pooled.end());
    if (pooled.empty()) return r;

    r.empty_eval = true;
    for (const AlphaStats& s : pooled) {
        r.per_alpha.push_back(finalize_alpha(s));
        if (s.tp + s.fn + s.fp != 0) r.empty_eval = false;
    }
    const double n = static_cast<double>(pooled.size());
    auto mean = [&](double AlphaMetrics::*field) {
        double sum = 0.0;
        for (const AlphaMetrics& m : r.per_alpha) sum += m.*field;
        return sum / n;
    };
    r.hota = mean(&AlphaMetrics::hota);
    r.det_a = mean(&AlphaMetrics::det_a);
    r.ass_a = mean(&AlphaMetrics::ass_a);
    r.det_re = mean(&AlphaMetrics::det_re);
    r.det_pr = mean(&AlphaMetrics::det_pr);
    r.ass_re = mean(&AlphaMetrics::ass_re);
    r.ass_pr = mean(&AlphaMetrics::ass_pr);
    r.loc_a = mean(&AlphaMetrics::loc_a);
    return r;
}

}  // namespace rmot
