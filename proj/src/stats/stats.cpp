#include "rmot/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <set>
#include <tuple>

#include "rmot/error.hpp"
#include "rmot/parallel.hpp"

namespace rmot {
namespace {

constexpr int kRatioBins = 20;

struct FrameBin {
    std::int64_t lo;
    std::int64_t hi;  // inclusive; max() for open-ended
};

// The leading [0,0] bin holds no-target expressions.
constexpr FrameBin kFrameBins[] = {
    {0, 0},     {1, 10},    {11, 25},   {26, 50},
    {51, 100},  {101, 200}, {201, 400}, {401, std::numeric_limits<std::int64_t>::max()},
};

struct ExpressionPartial {
    double ratio = 0.0;
    std::int64_t active = 0;
    std::int64_t boxes = 0;
    std::set<TrackId> tracks;
    std::string normalized;
    std::vector<std::string> tokens;
};

std::vector<HistogramBin> empty_ratio_histogram() {
    std::vector<HistogramBin> bins(kRatioBins);
    for (int k = 0; k < kRatioBins; ++k) {
        bins[static_cast<std::size_t>(k)] = {static_cast<double>(k) / kRatioBins, static_cast<double>(k + 1) / kRatioBins, 0};
    }
    return bins;
}

std::vector<HistogramBin> empty_frame_histogram() {
    std::vector<HistogramBin> bins;
    for (const FrameBin& b : kFrameBins) {
        const double hi = b.hi == std::numeric_limits<std::int64_t>::max() ? std::numeric_limits<double>::infinity()
                                                                            : static_cast<double>(b.hi);
        bins.push_back({static_cast<double>(b.lo), hi, 0});
    }
    return bins;
}

}  // namespace

double temporal_ratio(const ExpressionTask& task, Frame sequence_length) {
    if (sequence_length < 1) {
        throw Error("ZERO_LENGTH_SEQUENCE", fmt::format("sequence {} has length {}", task.sequence_id, sequence_length));
    }
    const auto active = static_cast<double>(task.active_frames());
    return std::min(1.0, active / static_cast<double>(sequence_length));
}

std::string normalize_expression_text(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(ch);
    }
    return out;
}

std::vector<std::string> vocabulary_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) tokens.push_back(std::move(cur));
        cur.clear();
    };
    for (char ch : text) {
        const auto uch = static_cast<unsigned char>(ch);
        if (std::isspace(uch)) {
            flush();
        } else if (!std::ispunct(uch)) {
            cur.push_back(static_cast<char>(std::tolower(uch)));
        }
    }
    flush();
    return tokens;
}

StatsReport compute_stats(const Dataset& dataset, unsigned workers) {
    StatsReport r;
    r.temporal_ratio_histogram = empty_ratio_histogram();
    r.frames_per_expression_histogram = empty_frame_histogram();

    r.videos = static_cast<std::int64_t>(dataset.sequences.size());
    for (const Sequence& s : dataset.sequences) r.frames += s.length;

    std::vector<const ExpressionTask*> tasks;
    for (const ExpressionTask& e : dataset.expressions) tasks.push_back(&e);
    std::sort(tasks.begin(), tasks.end(), [](const ExpressionTask* a, const ExpressionTask* b) {
        return std::tie(a->sequence_id, a->expression_id) < std::tie(b->sequence_id, b->expression_id);
    });

    std::vector<ExpressionPartial> parts(tasks.size());
    parallel_for(tasks.size(), resolve_workers(workers), [&](std::size_t i) {
        const ExpressionTask& e = *tasks[i];
        ExpressionPartial& p = parts[i];
        p.active = static_cast<std::int64_t>(e.active_frames());
        const Sequence* seq = dataset.find_sequence(e.sequence_id);
        p.ratio = seq && seq->length >= 1 ? temporal_ratio(e, seq->length) : 0.0;
        for (const auto& [frame, targets] : e.targets) {
            p.boxes += static_cast<std::int64_t>(targets.size());
            for (const auto& [track, box] : targets) p.tracks.insert(track);
        }
        p.normalized = normalize_expression_text(e.text);
        p.tokens = vocabulary_tokens(e.text);
    });

    std::set<std::string> texts;
    std::set<std::string> vocab;
    std::set<std::pair<std::string, TrackId>> instances;
    double ratio_sum = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const ExpressionPartial& p = parts[i];
        if (tasks[i]->no_target) ++r.no_target_expressions;
        texts.insert(p.normalized);
        vocab.insert(p.tokens.begin(), p.tokens.end());
        for (TrackId t : p.tracks) instances.emplace(tasks[i]->sequence_id, t);
        r.instances_total += static_cast<std::int64_t>(p.tracks.size());
        r.bbox_total += p.boxes;
        ratio_sum += p.ratio;

        const Sequence* seq = dataset.find_sequence(tasks[i]->sequence_id);
        const std::int64_t len = seq ? seq->length : 0;
        // Integer bin placement keeps boundaries exact (0.5 lands in [0.50,0.55)).
        const std::int64_t bin = len > 0 ? std::min<std::int64_t>(kRatioBins - 1, p.active * kRatioBins / len) : 0;
        ++r.temporal_ratio_histogram[static_cast<std::size_t>(bin)].count;
        for (std::size_t b = 0; b < std::size(kFrameBins); ++b) {
            if (p.active >= kFrameBins[b].lo && p.active <= kFrameBins[b].hi) {
                ++r.frames_per_expression_histogram[b].count;
                break;
            }
        }
    }

    r.expressions_total = static_cast<std::int64_t>(tasks.size());
    r.distinct_expressions = static_cast<std::int64_t>(texts.size());
    r.distinct_instances = static_cast<std::int64_t>(instances.size());
    r.word_vocab = static_cast<std::int64_t>(vocab.size());
    if (r.videos > 0) r.expressions_per_sequence = static_cast<double>(r.expressions_total) / static_cast<double>(r.videos);
    if (r.expressions_total > 0) {
        r.instances_per_expression = static_cast<double>(r.instances_total) / static_cast<double>(r.expressions_total);
        r.temporal_ratio_mean = ratio_sum / static_cast<double>(r.expressions_total);
    }
    return r;
}

namespace {

void write_histogram(const std::vector<HistogramBin>& bins, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("OUTPUT_UNWRITABLE", "cannot open for writing", path.string());
    out << "lower,upper,count\n";
    for (const HistogramBin& b : bins) {
        out << fmt::format("{},{},{}\n", b.lower, std::isinf(b.upper) ? std::string("inf") : fmt::format("{}", b.upper),
                           b.count);
    }
    if (!out) throw Error("OUTPUT_UNWRITABLE", "write failed", path.string());
}

}  // namespace

void emit_histograms(const StatsReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("OUTPUT_UNWRITABLE", ec.message(), dir.string());
    write_histogram(report.temporal_ratio_histogram, dir / "temporal_ratio_histogram.csv");
    write_histogram(report.frames_per_expression_histogram, dir / "frames_per_expression_histogram.csv");
}

}  // namespace rmot
