#include "rmot/report.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rmot/error.hpp"

namespace rmot::report {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormat = "rmot-report/1";

json value_entry(std::optional<double> v) {
    if (!v) return nullptr;
    return {{"value", *v}, {"display", display_percent(*v)}};
}

std::optional<double> read_value(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.at("value").get<double>();
}

json alpha_metrics_json(const AlphaMetrics& m) {
    return {{"alpha", m.alpha},   {"HOTA", m.hota},     {"DetA", m.det_a},   {"AssA", m.ass_a}, {"LocA", m.loc_a},
            {"DetRe", m.det_re}, {"DetPr", m.det_pr}, {"AssRe", m.ass_re}, {"AssPr", m.ass_pr}};
}

AlphaMetrics alpha_metrics_from(const json& j) {
    AlphaMetrics m;
    m.alpha = j.at("alpha").get<double>();
    m.hota = j.at("HOTA").get<double>();
    m.det_a = j.at("DetA").get<double>();
    m.ass_a = j.at("AssA").get<double>();
    m.loc_a = j.at("LocA").get<double>();
    m.det_re = j.at("DetRe").get<double>();
    m.det_pr = j.at("DetPr").get<double>();
    m.ass_re = j.at("AssRe").get<double>();
    m.ass_pr = j.at("AssPr").get<double>();
    return m;
}

json counts_json(const AlphaStats& s) {
    return {{"alpha", s.alpha},         {"tp", s.tp},
            {"fn", s.fn},               {"fp", s.fp},
            {"iou_sum", s.iou_sum},     {"ass_a_sum", s.ass_a_sum},
            {"ass_re_sum", s.ass_re_sum}, {"ass_pr_sum", s.ass_pr_sum}};
}

AlphaStats counts_from(const json& j) {
    AlphaStats s;
    s.alpha = j.at("alpha").get<double>();
    s.tp = j.at("tp").get<std::int64_t>();
    s.fn = j.at("fn").get<std::int64_t>();
    s.fp = j.at("fp").get<std::int64_t>();
    s.iou_sum = j.at("iou_sum").get<double>();
    s.ass_a_sum = j.at("ass_a_sum").get<double>();
    s.ass_re_sum = j.at("ass_re_sum").get<double>();
    s.ass_pr_sum = j.at("ass_pr_sum").get<double>();
    return s;
}

/// Metric values in table order; composites are filled in by the caller.
json metrics_json(const MetricReport& r, std::optional<double> hota_s, std::optional<double> hota_m, bool composites) {
    json m = {{"HOTA", value_entry(r.hota)}, {"DetA", value_entry(r.det_a)}, {"AssA", value_entry(r.ass_a)}};
    if (composites) {
        m["HOTA_S"] = value_entry(hota_s);
        m["HOTA_M"] = value_entry(hota_m);
    }
    m["LocA"] = value_entry(r.loc_a);
    m["DetRe"] = value_entry(r.det_re);
    m["DetPr"] = value_entry(r.det_pr);
    m["AssRe"] = value_entry(r.ass_re);
    m["AssPr"] = value_entry(r.ass_pr);
    return m;
}

json metric_report_json(const MetricReport& r, std::optional<double> hota_s = std::nullopt,
                        std::optional<double> hota_m = std::nullopt, bool composites = false) {
    json flags = json::array();
    if (r.empty_eval) flags.push_back("EMPTY_EVAL");
    json per_alpha = json::array();
    for (const AlphaMetrics& m : r.per_alpha) per_alpha.push_back(alpha_metrics_json(m));
    json counts = json::array();
    for (const AlphaStats& s : r.counts) counts.push_back(counts_json(s));
    return {{"metrics", metrics_json(r, hota_s, hota_m, composites)},
            {"flags", std::move(flags)},
            {"per_alpha", std::move(per_alpha)},
            {"counts", std::move(counts)}};
}

MetricReport metric_report_from(const json& j) {
    MetricReport r;
    const json& m = j.at("metrics");
    r.hota = *read_value(m.at("HOTA"));
    r.det_a = *read_value(m.at("DetA"));
    r.ass_a = *read_value(m.at("AssA"));
    r.loc_a = *read_value(m.at("LocA"));
    r.det_re = *read_value(m.at("DetRe"));
    r.det_pr = *read_value(m.at("DetPr"));
    r.ass_re = *read_value(m.at("AssRe"));
    r.ass_pr = *read_value(m.at("AssPr"));
    for (const json& f : j.at("flags")) {
        if (f == "EMPTY_EVAL") r.empty_eval = true;
    }
    for (const json& a : j.at("per_alpha")) r.per_alpha.push_back(alpha_metrics_from(a));
    for (const json& c : j.at("counts")) r.counts.push_back(counts_from(c));
    return r;
}

json attribute_list(const std::vector<Attribute>& attrs) {
    json out = json::array();
    for (Attribute a : attrs) out.push_back(std::string(attribute_name(a)));
    return out;
}

std::vector<Attribute> attribute_list_from(const json& j) {
    std::vector<Attribute> out;
    for (const json& n : j) {
        const auto a = attribute_from_name(n.get<std::string>());
        if (!a) throw Error("MALFORMED_DOCUMENT", fmt::format("unknown attribute '{}'", n.get<std::string>()));
        out.push_back(*a);
    }
    return out;
}

json stats_json(const StatsReport& s) {
    auto hist = [](const std::vector<HistogramBin>& bins) {
        json out = json::array();
        for (const HistogramBin& b : bins) {
            out.push_back({{"lower", b.lower}, {"upper", std::isinf(b.upper) ? json(nullptr) : json(b.upper)}, {"count", b.count}});
        }
        return out;
    };
    return {{"videos", s.videos},
            {"frames", s.frames},
            {"expressions_total", s.expressions_total},
            {"no_target_expressions", s.no_target_expressions},
            {"distinct_expressions", s.distinct_expressions},
            {"expressions_per_sequence", s.expressions_per_sequence},
            {"instances_total", s.instances_total},
            {"distinct_instances", s.distinct_instances},
            {"instances_per_expression", s.instances_per_expression},
            {"bbox_total", s.bbox_total},
            {"word_vocab", s.word_vocab},
            {"temporal_ratio_mean", s.temporal_ratio_mean},
            {"temporal_ratio_histogram", hist(s.temporal_ratio_histogram)},
            {"frames_per_expression_histogram", hist(s.frames_per_expression_histogram)}};
}

StatsReport stats_from(const json& j) {
    auto hist = [](const json& arr) {
        std::vector<HistogramBin> bins;
        for (const json& b : arr) {
            bins.push_back({b.at("lower").get<double>(),
                            b.at("upper").is_null() ? std::numeric_limits<double>::infinity() : b.at("upper").get<double>(),
                            b.at("count").get<std::int64_t>()});
        }
        return bins;
    };
    StatsReport s;
    s.videos = j.at("videos").get<std::int64_t>();
    s.frames = j.at("frames").get<std::int64_t>();
    s.expressions_total = j.at("expressions_total").get<std::int64_t>();
    s.no_target_expressions = j.at("no_target_expressions").get<std::int64_t>();
    s.distinct_expressions = j.at("distinct_expressions").get<std::int64_t>();
    s.expressions_per_sequence = j.at("expressions_per_sequence").get<double>();
    s.instances_total = j.at("instances_total").get<std::int64_t>();
    s.distinct_instances = j.at("distinct_instances").get<std::int64_t>();
    s.instances_per_expression = j.at("instances_per_expression").get<double>();
    s.bbox_total = j.at("bbox_total").get<std::int64_t>();
    s.word_vocab = j.at("word_vocab").get<std::int64_t>();
    s.temporal_ratio_mean = j.at("temporal_ratio_mean").get<double>();
    s.temporal_ratio_histogram = hist(j.at("temporal_ratio_histogram"));
    s.frames_per_expression_histogram = hist(j.at("frames_per_expression_histogram"));
    return s;
}

json strings(const std::vector<std::string>& v) { return json(v); }

}  // namespace

std::string display_percent(double fraction) {
    const double rounded = std::round(fraction * 10000.0) / 100.0;
    return fmt::format("{:.2f}", rounded == 0.0 ? 0.0 : rounded);
}

std::string to_json(const ReportDocument& doc) {
    json out = {{"format", kFormat}};
    if (doc.config) {
        out["config"] = {{"score_threshold", doc.config->score_threshold},
                         {"beta_ref", doc.config->beta_ref},
                         {"alpha_grid", doc.config->alpha_grid},
                         {"scene_attributes", attribute_list(doc.config->scene_attributes)},
                         {"motion_attributes", attribute_list(doc.config->motion_attributes)}};
    }
    out["aggregation"] = doc.aggregation == Aggregation::Macro ? "macro" : "pooled";
    if (doc.evaluation) {
        const EvaluationResult& e = *doc.evaluation;
        const AttributeReport* a = e.attributes ? &*e.attributes : nullptr;
        json ev = metric_report_json(e.overall, a ? a->hota_s : std::nullopt, a ? a->hota_m : std::nullopt, true);
        ev["summary"] = {{"units", e.summary.units},
                         {"no_target_units", e.summary.no_target_units},
                         {"raw_detections", e.summary.raw_detections},
                         {"retained_detections", e.summary.retained_detections}};
        if (a) {
            json per = json::object();
            for (Attribute attr : kAllAttributes) {
                const auto i = static_cast<std::size_t>(attr);
                per[std::string(attribute_name(attr))] = {
                    {"HOTA", value_entry(a->hota[i])},
                    {"frame_count", a->frame_counts[i]},
                    {"detail", a->detail[i] ? metric_report_json(*a->detail[i]) : json(nullptr)}};
            }
            ev["attributes"] = {{"per_attribute", std::move(per)},
                                {"HOTA_S", value_entry(a->hota_s)},
                                {"HOTA_M", value_entry(a->hota_m)},
                                {"n_s", a->n_s},
                                {"n_m", a->n_m},
                                {"warnings", strings(a->warnings)}};
        } else {
            ev["attributes"] = nullptr;
        }
        ev["warnings"] = strings(e.warnings);
        ev["notes"] = {"all metrics are arithmetic means over the alpha grid",
                       "attribute views restrict every unit to the flagged frames"};
        out["evaluation"] = std::move(ev);
    }
    if (doc.stats) out["stats"] = stats_json(*doc.stats);
    return out.dump(2) + "\n";
}

ReportDocument from_json(const std::string& text) {
    ReportDocument doc;
    try {
        const json j = json::parse(text);
        if (j.value("format", std::string{}) != kFormat) throw Error("MALFORMED_DOCUMENT", "not an rmot report");
        if (j.contains("config")) {
            const json& c = j.at("config");
            EvalConfig cfg;
            cfg.score_threshold = c.at("score_threshold").get<double>();
            cfg.beta_ref = c.at("beta_ref").get<double>();
            cfg.alpha_grid = c.at("alpha_grid").get<std::vector<double>>();
            cfg.scene_attributes = attribute_list_from(c.at("scene_attributes"));
            cfg.motion_attributes = attribute_list_from(c.at("motion_attributes"));
            doc.config = std::move(cfg);
        }
        doc.aggregation = j.value("aggregation", std::string("pooled")) == "macro" ? Aggregation::Macro : Aggregation::Pooled;
        if (j.contains("evaluation")) {
            const json& ev = j.at("evaluation");
            EvaluationResult e;
            e.overall = metric_report_from(ev);
            const json& s = ev.at("summary");
            e.summary = {s.at("units").get<std::size_t>(), s.at("no_target_units").get<std::size_t>(),
                         s.at("raw_detections").get<std::int64_t>(), s.at("retained_detections").get<std::int64_t>()};
            e.warnings = ev.at("warnings").get<std::vector<std::string>>();
            if (!ev.at("attributes").is_null()) {
                const json& a = ev.at("attributes");
                AttributeReport r;
                for (Attribute attr : kAllAttributes) {
                    const auto i = static_cast<std::size_t>(attr);
                    const json& per = a.at("per_attribute").at(std::string(attribute_name(attr)));
                    r.hota[i] = read_value(per.at("HOTA"));
                    r.frame_counts[i] = per.at("frame_count").get<std::int64_t>();
                    if (!per.at("detail").is_null()) r.detail[i] = metric_report_from(per.at("detail"));
                }
                r.hota_s = read_value(a.at("HOTA_S"));
                r.hota_m = read_value(a.at("HOTA_M"));
                r.n_s = a.at("n_s").get<std::size_t>();
                r.n_m = a.at("n_m").get<std::size_t>();
                r.warnings = a.at("warnings").get<std::vector<std::string>>();
                e.attributes = std::move(r);
            }
            doc.evaluation = std::move(e);
        }
        if (j.contains("stats")) doc.stats = stats_from(j.at("stats"));
    } catch (const json::exception& e) {
        throw Error("MALFORMED_DOCUMENT", e.what());
    }
    return doc;
}

std::string to_table(const ReportDocument& doc) {
    std::string out;
    auto cell = [](std::optional<double> v) { return v ? display_percent(*v) : std::string("--"); };
    if (doc.evaluation) {
        const EvaluationResult& e = *doc.evaluation;
        const MetricReport& r = e.overall;
        const AttributeReport* a = e.attributes ? &*e.attributes : nullptr;
        out += fmt::format("{:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n", "HOTA", "DetA", "AssA",
                           "HOTA_S", "HOTA_M", "LocA", "DetRe", "DetPr", "AssRe", "AssPr");
        out += fmt::format("{:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n", cell(r.hota), cell(r.det_a),
                           cell(r.ass_a), cell(a ? a->hota_s : std::nullopt), cell(a ? a->hota_m : std::nullopt),
                           cell(r.loc_a), cell(r.det_re), cell(r.det_pr), cell(r.ass_re), cell(r.ass_pr));
        if (r.empty_eval) out += "flag: EMPTY_EVAL\n";
        if (a) {
            out += "\n";
            std::string head, row;
            for (Attribute attr : kAllAttributes) {
                const auto i = static_cast<std::size_t>(attr);
                const std::string name(attribute_name(attr));
                const std::size_t width = std::max<std::size_t>(name.size(), 6);
                head += fmt::format("{:>{}} ", name, width);
                row += fmt::format("{:>{}} ", cell(a->hota[i]), width);
            }
            out += head + "\n" + row + "\n";
        }
        out += fmt::format("\nunits {}  no-target {}  detections {} retained {}\n", e.summary.units,
                           e.summary.no_target_units, e.summary.raw_detections, e.summary.retained_detections);
    }
    if (doc.stats) {
        const StatsReport& s = *doc.stats;
        out += fmt::format("videos {}\nframes {}\nexpressions {}\nno-target expressions {}\ndistinct expressions {}\n"
                           "expressions per sequence {:.1f}\ninstances {}\ndistinct instances {}\n"
                           "instances per expression {:.1f}\nbbox annotations {}\nwords {}\n"
                           "temporal ratio per expression {:.3f}\n",
                           s.videos, s.frames, s.expressions_total, s.no_target_expressions, s.distinct_expressions,
                           s.expressions_per_sequence, s.instances_total, s.distinct_instances,
                           s.instances_per_expression, s.bbox_total, s.word_vocab, s.temporal_ratio_mean);
    }
    return out;
}

void write_report(const ReportDocument& doc, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    for (const auto& [name, content] : {std::pair{"report.json", to_json(doc)}, std::pair{"report.txt", to_table(doc)}}) {
        const auto path = dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("OUTPUT_UNWRITABLE", "cannot open for writing", path.string());
        out << content;
        if (!out) throw Error("OUTPUT_UNWRITABLE", "write failed", path.string());
    }
}

ReportDocument read_report(const std::filesystem::path& json_path) {
    std::ifstream in(json_path, std::ios::binary);
    if (!in) throw Error("FILE_NOT_FOUND", "cannot open for reading", json_path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

}  // namespace rmot::report
