#include "rmot/evaluation.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <set>

#include "rmot/attributes.hpp"
#include "rmot/error.hpp"
#include "rmot/geometry.hpp"
#include "rmot/parallel.hpp"

namespace rmot {
namespace {

const std::vector<Detection> kNoDetections;

struct Unit {
    const ExpressionTask* task = nullptr;
    const AttributeFrameLabels* labels = nullptr;
    std::vector<Detection> filtered;
};

/// A view is the whole evaluation (no attribute) or one attribute restriction.
using View = std::optional<Attribute>;

struct Prepared {
    std::vector<Unit> units;
    EvaluationSummary summary;
    std::vector<std::string> warnings;
};

Prepared prepare(const Dataset& dataset, const PredictionSet& predictions, const EvalConfig& cfg, unsigned workers) {
    cfg.validate();
    Prepared p;

    std::vector<const ExpressionTask*> tasks;
    tasks.reserve(dataset.expressions.size());
    for (const ExpressionTask& e : dataset.expressions) tasks.push_back(&e);
    std::sort(tasks.begin(), tasks.end(), [](const ExpressionTask* a, const ExpressionTask* b) {
        return std::tie(a->sequence_id, a->expression_id) < std::tie(b->sequence_id, b->expression_id);
    });
    for (std::size_t i = 1; i < tasks.size(); ++i) {
        if (tasks[i]->sequence_id == tasks[i - 1]->sequence_id && tasks[i]->expression_id == tasks[i - 1]->expression_id) {
            throw Error("DUPLICATE_EXPRESSION",
                        fmt::format("expression {} listed twice in sequence {}", tasks[i]->expression_id, tasks[i]->sequence_id));
        }
    }

    std::set<UnitKey> known;
    for (const ExpressionTask* t : tasks) known.emplace(t->sequence_id, t->expression_id);
    for (const auto& [key, dets] : predictions) {
        if (!known.contains(key)) {
            p.warnings.push_back(fmt::format("predictions for unknown unit {}/{} ignored", key.first, key.second));
        }
    }

    p.units.resize(tasks.size());
    parallel_for(tasks.size(), workers, [&](std::size_t i) {
        Unit& u = p.units[i];
        u.task = tasks[i];
        u.labels = dataset.find_attributes(tasks[i]->sequence_id);
        const auto it = predictions.find({tasks[i]->sequence_id, tasks[i]->expression_id});
        const auto& raw = it == predictions.end() ? kNoDetections : it->second;
        u.filtered = filter_predictions(raw, cfg);
    });

    p.summary.units = p.units.size();
    for (const Unit& u : p.units) {
        if (u.task->no_target) ++p.summary.no_target_units;
        const auto it = predictions.find({u.task->sequence_id, u.task->expression_id});
        if (it != predictions.end()) p.summary.raw_detections += static_cast<std::int64_t>(it->second.size());
        p.summary.retained_detections += static_cast<std::int64_t>(u.filtered.size());
    }
    return p;
}

/// Flagged frame counts over the distinct sequences that have units.
std::array<std::int64_t, kAttributeCount> attribute_frame_counts(const Dataset& dataset, const Prepared& p,
                                                                 std::vector<std::string>& warnings) {
    std::array<std::int64_t, kAttributeCount> counts{};
    std::set<std::string> seen;
    for (const Unit& u : p.units) {
        if (!seen.insert(u.task->sequence_id).second) continue;
        if (u.labels == nullptr) {
            warnings.push_back(fmt::format("sequence {} has no attribute labels; its frames carry no attribute",
                                           u.task->sequence_id));
            continue;
        }
        const Sequence* seq = dataset.find_sequence(u.task->sequence_id);
        const Frame limit = seq ? std::min(seq->length, u.labels->frame_count()) : u.labels->frame_count();
        for (Frame f = 1; f <= limit; ++f) {
            for (Attribute a : kAllAttributes) {
                if (u.labels->has(f, a)) ++counts[static_cast<std::size_t>(a)];
            }
        }
    }
    return counts;
}

std::vector<AlphaStats> evaluate_view(const Unit& u, const View& view, const EvalConfig& cfg, MatchSolver solver) {
    if (!view) return evaluate_unit(UnitProblem(*u.task, u.filtered), cfg.alpha_grid, solver);
    static const AttributeFrameLabels kNoLabels;
    const auto [task, preds] = restrict_to_attribute(*u.task, u.filtered, u.labels ? *u.labels : kNoLabels, *view);
    return evaluate_unit(UnitProblem(task, preds), cfg.alpha_grid, solver);
}

std::vector<MetricReport> run_views(const Prepared& p, const std::vector<View>& views, const EvalConfig& cfg,
                                    const EvalOptions& options) {
    const std::size_t nu = p.units.size();
    std::vector<std::vector<AlphaStats>> stats(nu * views.size());
    parallel_for(stats.size(), resolve_workers(options.workers), [&](std::size_t i) {
        stats[i] = evaluate_view(p.units[i % nu], views[i / nu], cfg, options.solver);
    });

    std::vector<MetricReport> out;
    out.reserve(views.size());
    for (std::size_t v = 0; v < views.size(); ++v) {
        std::span<const std::vector<AlphaStats>> slice(stats.data() + v * nu, nu);
        if (options.aggregation == Aggregation::Macro) {
            out.push_back(finalize_macro(slice));
        } else if (nu == 0) {
            std::vector<AlphaStats> empty(cfg.alpha_grid.size());
            for (std::size_t k = 0; k < empty.size(); ++k) empty[k].alpha = cfg.alpha_grid[k];
            out.push_back(finalize(empty));
        } else {
            out.push_back(finalize(accumulate(slice)));
        }
    }
    return out;
}

std::optional<double> composite(const AttributeReport& r, const std::vector<Attribute>& set, std::size_t& n_present) {
    std::vector<double> values;
    for (Attribute a : set) {
        const auto& v = r.hota[static_cast<std::size_t>(a)];
        if (v) values.push_back(*v);
    }
    n_present = values.size();
    if (values.empty()) return std::nullopt;
    return compose_geometric(values);
}

}  // namespace

MetricReport finalize_macro(std::span<const std::vector<AlphaStats>> units) {
    if (units.empty()) return {};
    const std::size_t na = units.front().size();
    std::vector<MetricReport> reports;
    for (const auto& u : units) {
        if (u.size() != na) throw Error("ALPHA_GRID_MISMATCH", "units were evaluated on different alpha grids");
        MetricReport r = finalize(u);
        if (!r.empty_eval) reports.push_back(std::move(r));
    }
    MetricReport out;
    out.counts = accumulate(units);
    if (reports.empty()) return finalize(out.counts);

    const double n = static_cast<double>(reports.size());
    out.per_alpha.resize(na);
    for (std::size_t k = 0; k < na; ++k) {
        AlphaMetrics& m = out.per_alpha[k];
        m.alpha = out.counts[k].alpha;
        for (const MetricReport& r : reports) {
            const AlphaMetrics& x = r.per_alpha[k];
            m.hota += x.hota;
            m.det_a += x.det_a;
            m.ass_a += x.ass_a;
            m.det_re += x.det_re;
            m.det_pr += x.det_pr;
            m.ass_re += x.ass_re;
            m.ass_pr += x.ass_pr;
            m.loc_a += x.loc_a;
        }
        for (double* f : {&m.hota, &m.det_a, &m.ass_a, &m.det_re, &m.det_pr, &m.ass_re, &m.ass_pr, &m.loc_a}) *f /= n;
    }
    for (const MetricReport& r : reports) {
        out.hota += r.hota;
        out.det_a += r.det_a;
        out.ass_a += r.ass_a;
        out.det_re += r.det_re;
        out.det_pr += r.det_pr;
        out.ass_re += r.ass_re;
        out.ass_pr += r.ass_pr;
        out.loc_a += r.loc_a;
    }
    for (double* f : {&out.hota, &out.det_a, &out.ass_a, &out.det_re, &out.det_pr, &out.ass_re, &out.ass_pr, &out.loc_a}) {
        *f /= n;
    }
    return out;
}

EvaluationResult evaluate(const Dataset& dataset, const PredictionSet& predictions, const EvalConfig& cfg,
                          const EvalOptions& options) {
    Prepared p = prepare(dataset, predictions, cfg, resolve_workers(options.workers));
    EvaluationResult result;
    result.summary = p.summary;
    result.warnings = p.warnings;

    std::vector<View> views{std::nullopt};
    std::optional<AttributeReport> attrs;
    if (options.with_attributes && !dataset.attributes.empty()) {
        attrs.emplace();
        attrs->frame_counts = attribute_frame_counts(dataset, p, attrs->warnings);
        for (Attribute a : kAllAttributes) {
            if (attrs->frame_counts[static_cast<std::size_t>(a)] > 0) {
                views.emplace_back(a);
            } else {
                attrs->warnings.push_back(fmt::format("attribute {} absent from the evaluation", attribute_name(a)));
            }
        }
    }

    std::vector<MetricReport> reports = run_views(p, views, cfg, options);
    result.overall = std::move(reports.front());
    if (attrs) {
        for (std::size_t v = 1; v < views.size(); ++v) {
            const auto idx = static_cast<std::size_t>(*views[v]);
            attrs->hota[idx] = reports[v].hota;
            attrs->detail[idx] = std::move(reports[v]);
        }
        attrs->hota_s = composite(*attrs, cfg.scene_attributes, attrs->n_s);
        attrs->hota_m = composite(*attrs, cfg.motion_attributes, attrs->n_m);
        if (attrs->n_s < cfg.scene_attributes.size()) {
            attrs->warnings.push_back(fmt::format("HOTA_S composed over {} of {} attributes", attrs->n_s,
                                                  cfg.scene_attributes.size()));
        }
        if (attrs->n_m < cfg.motion_attributes.size()) {
            attrs->warnings.push_back(fmt::format("HOTA_M composed over {} of {} attributes", attrs->n_m,
                                                  cfg.motion_attributes.size()));
        }
        result.attributes = std::move(attrs);
    }
    return result;
}

std::optional<double> attribute_hota(const Dataset& dataset, const PredictionSet& predictions, Attribute attr,
                                     const EvalConfig& cfg, const EvalOptions& options) {
    Prepared p = prepare(dataset, predictions, cfg, resolve_workers(options.workers));
    std::vector<std::string> warnings;
    if (attribute_frame_counts(dataset, p, warnings)[static_cast<std::size_t>(attr)] == 0) return std::nullopt;
    return run_views(p, {View{attr}}, cfg, options).front().hota;
}

}  // namespace rmot
