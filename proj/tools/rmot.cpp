// rmot: evaluate, stats, synth and validate front end.
//
// Exit codes: 0 success, 1 I/O or parse error, 2 validation violations.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rmot/error.hpp"
#include "rmot/evaluation.hpp"
#include "rmot/io.hpp"
#include "rmot/parallel.hpp"
#include "rmot/report.hpp"
#include "rmot/stats.hpp"
#include "rmot/synth.hpp"
#include "rmot/validate.hpp"

#ifndef RMOT_VERSION
#define RMOT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kViolations = 2;

std::vector<double> parse_alphas(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw rmot::Error("INVALID_CONFIG", fmt::format("bad alpha value '{}'", item));
        }
    }
    return out;
}

void print_violations(const std::vector<rmot::Violation>& vs) {
    for (const auto& v : vs) {
        std::string where = v.sequence_id;
        if (!v.expression_id.empty()) where += "/" + v.expression_id;
        if (v.frame) where += fmt::format(" frame {}", *v.frame);
        if (v.track) where += fmt::format(" track {}", v.track->value);
        fmt::print(stderr, "{}: {}: {}\n", v.code, where, v.message);
    }
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw rmot::Error("OUTPUT_UNWRITABLE", "cannot write", path.string());
}

json digests(const std::vector<fs::path>& files) {
    json out = json::array();
    std::vector<fs::path> sorted = files;
    std::sort(sorted.begin(), sorted.end());
    for (const fs::path& f : sorted) out.push_back({{"path", f.string()}, {"sha256", rmot::io::sha256_file(f)}});
    return out;
}

std::vector<rmot::Violation> check(const rmot::Dataset& ds) {
    return rmot::validate_dataset(ds.sequences, ds.expressions, ds.attributes);
}

struct EvaluateArgs {
    std::string gt_dir;
    std::string pred_dir;
    double beta_ref = 0.4;
    double score_threshold = 0.5;
    std::string alphas;
    std::string attributes;
    bool macro = false;
    unsigned workers = 0;
    std::string out = "rmot_report";
    bool strict = false;
    bool allow_violations = false;
};

int run_evaluate(const EvaluateArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    rmot::EvalConfig cfg;
    cfg.beta_ref = a.beta_ref;
    cfg.score_threshold = a.score_threshold;
    if (!a.alphas.empty()) cfg.alpha_grid = parse_alphas(a.alphas);
    cfg.validate();

    std::optional<fs::path> attr_dir;
    if (!a.attributes.empty()) attr_dir = fs::path(a.attributes);
    const auto load = rmot::io::load_dataset(a.gt_dir, attr_dir);
    for (const auto& w : load.warnings) fmt::print(stderr, "warning: {}\n", w);
    const auto violations = check(load.dataset);
    if (!violations.empty()) {
        print_violations(violations);
        if (!a.allow_violations) return kViolations;
    }
    const auto preds = rmot::io::load_predictions(a.pred_dir, load.dataset, a.strict);
    for (const auto& w : preds.warnings) fmt::print(stderr, "warning: {}\n", w);

    rmot::EvalOptions opts;
    opts.aggregation = a.macro ? rmot::Aggregation::Macro : rmot::Aggregation::Pooled;
    opts.workers = rmot::resolve_workers(a.workers);
    rmot::report::ReportDocument doc;
    doc.config = cfg;
    doc.aggregation = opts.aggregation;
    doc.evaluation = rmot::evaluate(load.dataset, preds.predictions, cfg, opts);
    rmot::report::write_report(doc, a.out);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::vector<fs::path> inputs = load.files;
    inputs.insert(inputs.end(), preds.files.begin(), preds.files.end());
    json manifest;
    manifest["tool"] = "rmot";
    manifest["version"] = RMOT_VERSION;
    manifest["command"] = "evaluate";
    manifest["config"] = {{"score_threshold", cfg.score_threshold},
                          {"beta_ref", cfg.beta_ref},
                          {"alpha_grid", cfg.alpha_grid},
                          {"aggregation", a.macro ? "macro" : "pooled"},
                          {"strict", a.strict}};
    manifest["inputs"] = digests(inputs);
    manifest["outputs"] = digests({fs::path(a.out) / "report.json", fs::path(a.out) / "report.txt"});
    manifest["workers"] = opts.workers;
    manifest["seconds"] = seconds;
    write_text(fs::path(a.out) / "manifest.json", manifest.dump(2) + "\n");

    std::cout << rmot::report::to_table(doc);
    return kOk;
}

int run_stats(const std::string& gt_dir, const std::string& out, unsigned workers) {
    const auto load = rmot::io::load_dataset(gt_dir);
    for (const auto& w : load.warnings) fmt::print(stderr, "warning: {}\n", w);
    rmot::report::ReportDocument doc;
    doc.stats = rmot::compute_stats(load.dataset, rmot::resolve_workers(workers));
    if (!out.empty()) {
        rmot::report::write_report(doc, out);
        rmot::emit_histograms(*doc.stats, out);
    }
    std::cout << rmot::report::to_table(doc);
    return kOk;
}

template <typename T>
void read_field(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

void read_range(const json& j, const char* key, std::optional<std::pair<double, double>>& into) {
    if (j.contains(key)) into = std::pair{j.at(key).at(0).get<double>(), j.at(key).at(1).get<double>()};
}

void read_range(const json& j, const char* key, std::pair<double, double>& into) {
    if (j.contains(key)) into = {j.at(key).at(0).get<double>(), j.at(key).at(1).get<double>()};
}

std::pair<rmot::ScenarioConfig, rmot::PerturbationConfig> read_synth_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rmot::Error("FILE_NOT_FOUND", "cannot open", path.string());
    rmot::ScenarioConfig s;
    rmot::PerturbationConfig p;
    try {
        const json doc = json::parse(in);
        const json sj = doc.value("scenario", json::object());
        read_field(sj, "seed", s.seed);
        read_field(sj, "n_sequences", s.n_sequences);
        read_field(sj, "sequence_length", s.sequence_length);
        read_field(sj, "n_tracks", s.n_tracks);
        read_field(sj, "frame_width", s.frame_width);
        read_field(sj, "frame_height", s.frame_height);
        read_field(sj, "box_min", s.box_min);
        read_field(sj, "box_max", s.box_max);
        read_field(sj, "max_step", s.max_step);
        read_field(sj, "persistent_tracks", s.persistent_tracks);
        read_field(sj, "expressions", s.expressions);
        read_field(sj, "expression_templates", s.expression_templates);
        read_field(sj, "no_target_fraction", s.no_target_fraction);
        read_field(sj, "target_fraction", s.target_fraction);

        const json pj = doc.value("perturbation", json::object());
        read_field(pj, "seed", p.seed);
        read_field(pj, "miss_rate", p.miss_rate);
        read_field(pj, "fp_rate", p.fp_rate);
        read_field(pj, "idswitch_rate", p.idswitch_rate);
        read_field(pj, "jitter", p.jitter);
        read_range(pj, "confidence_range", p.confidence_range);
        read_range(pj, "referring_range", p.referring_range);
        read_range(pj, "fp_confidence_range", p.fp_confidence_range);
        read_range(pj, "fp_referring_range", p.fp_referring_range);
        read_field(pj, "fp_box_min", p.fp_box_min);
        read_field(pj, "fp_box_max", p.fp_box_max);
    } catch (const json::exception& e) {
        throw rmot::Error("MALFORMED_DOCUMENT", e.what(), path.string());
    }
    return {s, p};
}

int run_synth(const std::string& config, const std::string& out) {
    const auto [scfg, pcfg] = read_synth_config(config);
    const rmot::Scenario scenario = rmot::generate_scenario(scfg);
    const fs::path root(out);
    fs::remove_all(root / "dataset");
    fs::remove_all(root / "predictions");
    rmot::io::save_dataset(root / "dataset", scenario.dataset);
    rmot::io::save_predictions(root / "predictions", rmot::perturb_all(scenario, scfg, pcfg));
    fmt::print("wrote {} sequences, {} expressions to {}\n", scenario.dataset.sequences.size(),
               scenario.dataset.expressions.size(), root.string());
    return kOk;
}

int run_validate(const std::string& gt_dir, const std::string& attributes) {
    std::optional<fs::path> attr_dir;
    if (!attributes.empty()) attr_dir = fs::path(attributes);
    const auto load = rmot::io::load_dataset(gt_dir, attr_dir);
    for (const auto& w : load.warnings) fmt::print(stderr, "warning: {}\n", w);
    const auto violations = check(load.dataset);
    json report = json::array();
    for (const auto& v : violations) {
        json j = {{"code", v.code}, {"sequence_id", v.sequence_id}, {"expression_id", v.expression_id}};
        j["frame"] = v.frame ? json(*v.frame) : json(nullptr);
        j["track_id"] = v.track ? json(v.track->value) : json(nullptr);
        j["message"] = v.message;
        report.push_back(j);
    }
    std::cout << report.dump(2) << "\n";
    return violations.empty() ? kOk : kViolations;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Referring multi-object tracking evaluation"};
    app.set_version_flag("--version", RMOT_VERSION);
    app.require_subcommand(1);

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a dataset bundle");
    evaluate->add_option("gt_dir", ev.gt_dir, "Dataset bundle directory")->required();
    evaluate->add_option("pred_dir", ev.pred_dir, "One prediction file per expression unit")->required();
    evaluate->add_option("--beta-ref", ev.beta_ref, "Referring-score threshold")->capture_default_str();
    evaluate->add_option("--score-threshold", ev.score_threshold, "Detection confidence threshold")
        ->capture_default_str();
    evaluate->add_option("--alphas", ev.alphas, "Comma-separated IoU thresholds (default 0.05..0.95)");
    evaluate->add_option("--attributes", ev.attributes, "Attribute label directory (default <gt_dir>/attributes)");
    evaluate->add_flag("--macro", ev.macro, "Average per-unit metrics instead of pooling counts");
    evaluate->add_option("--workers", ev.workers, "Worker threads (0: RMOT_EVAL_WORKERS or all cores)");
    evaluate->add_option("--out", ev.out, "Report directory")->capture_default_str();
    evaluate->add_flag("--strict", ev.strict, "Missing prediction files are errors");
    evaluate->add_flag("--allow-violations", ev.allow_violations, "Evaluate even if validation fails");

    std::string stats_dir, stats_out;
    unsigned stats_workers = 0;
    auto* stats = app.add_subcommand("stats", "Dataset statistics and histograms");
    stats->add_option("gt_dir", stats_dir)->required();
    stats->add_option("--out", stats_out, "Write report and histogram CSVs here");
    stats->add_option("--workers", stats_workers);

    std::string synth_config, synth_out;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic bundle and predictions");
    synth->add_option("config", synth_config, "JSON with optional 'scenario' and 'perturbation' objects")->required();
    synth->add_option("out_dir", synth_out)->required();

    std::string validate_dir, validate_attrs;
    auto* validate = app.add_subcommand("validate", "Check a dataset bundle for violations");
    validate->add_option("gt_dir", validate_dir)->required();
    validate->add_option("--attributes", validate_attrs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kIoError;
    }

    try {
        if (*evaluate) return run_evaluate(ev);
        if (*stats) return run_stats(stats_dir, stats_out, stats_workers);
        if (*synth) return run_synth(synth_config, synth_out);
        if (*validate) return run_validate(validate_dir, validate_attrs);
    } catch (const rmot::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kIoError;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kIoError;
    }
    return kIoError;
}
