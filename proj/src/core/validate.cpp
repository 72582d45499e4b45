#include "rmot/validate.hpp"

#include <cmath>
#include <fmt/format.h>
#include <map>
#include <set>

namespace rmot {
namespace {

struct Collector {
    std::vector<Violation> out;

    void add(std::string code, const std::string& seq, const std::string& expr, std::optional<Frame> frame,
             std::optional<TrackId> track, std::string message) {
        out.push_back({std::move(code), seq, expr, frame, track, std::move(message)});
    }
};

void check_box(Collector& c, const BoundingBox& b, const std::string& seq, const std::string& expr, Frame f,
               TrackId t) {
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h)) {
        c.add("NON_FINITE_BOX", seq, expr, f, t, "box has a non-finite coordinate");
    } else if (!b.valid()) {
        c.add("NEGATIVE_EXTENT", seq, expr, f, t, fmt::format("box extent w={} h={}", b.w, b.h));
    }
}

void check_frame(Collector& c, Frame f, Frame length, const std::string& seq, const std::string& expr, TrackId t) {
    if (f < 1 || f > length) {
        c.add("FRAME_OUT_OF_BOUNDS", seq, expr, f, t, fmt::format("frame {} outside [1,{}]", f, length));
    }
}

}  // namespace

std::vector<Violation> validate_dataset(std::span<const Sequence> sequences,
                                        std::span<const ExpressionTask> expressions,
                                        std::span<const AttributeFrameLabels> attributes) {
    Collector c;
    std::map<std::string, const Sequence*> by_id;

    for (const Sequence& s : sequences) {
        if (!by_id.emplace(s.id, &s).second) {
            c.add("DUPLICATE_SEQUENCE", s.id, {}, std::nullopt, std::nullopt, "sequence id listed twice");
            continue;
        }
        if (s.length < 1) c.add("EMPTY_SEQUENCE", s.id, {}, std::nullopt, std::nullopt, "sequence has no frames");
        std::set<TrackId> seen;
        for (const GroundTruthTrack& t : s.tracks) {
            if (!seen.insert(t.track_id).second) {
                c.add("DUPLICATE_TRACK", s.id, {}, std::nullopt, t.track_id, "track id listed twice");
            }
            for (const auto& [f, box] : t.boxes) {
                check_frame(c, f, s.length, s.id, {}, t.track_id);
                check_box(c, box, s.id, {}, f, t.track_id);
            }
        }
    }

    std::set<std::pair<std::string, std::string>> expr_keys;
    for (const ExpressionTask& e : expressions) {
        if (!expr_keys.emplace(e.sequence_id, e.expression_id).second) {
            c.add("DUPLICATE_EXPRESSION", e.sequence_id, e.expression_id, std::nullopt, std::nullopt,
                  "expression id listed twice for this sequence");
        }
        const auto it = by_id.find(e.sequence_id);
        if (it == by_id.end()) {
            c.add("UNKNOWN_SEQUENCE", e.sequence_id, e.expression_id, std::nullopt, std::nullopt,
                  "expression references a sequence that does not exist");
        }
        const bool empty = e.active_frames() == 0;
        if (e.no_target != empty) {
            c.add("NO_TARGET_INCONSISTENT", e.sequence_id, e.expression_id, std::nullopt, std::nullopt,
                  e.no_target ? "flagged no-target but has target boxes" : "has no target boxes but is not flagged no-target");
        }
        for (const auto& [f, boxes] : e.targets) {
            for (const auto& [track, box] : boxes) {
                if (it != by_id.end()) check_frame(c, f, it->second->length, e.sequence_id, e.expression_id, track);
                check_box(c, box, e.sequence_id, e.expression_id, f, track);
            }
        }
    }

    for (const AttributeFrameLabels& labels : attributes) {
        const auto it = by_id.find(labels.sequence_id);
        if (it == by_id.end()) {
            c.add("ATTR_UNKNOWN_SEQUENCE", labels.sequence_id, {}, std::nullopt, std::nullopt,
                  "attribute labels for a sequence that does not exist");
        } else if (labels.frame_count() < it->second->length) {
            c.add("ATTR_MISSING_FRAMES", labels.sequence_id, {}, labels.frame_count() + 1, std::nullopt,
                  fmt::format("labels cover {} of {} frames", labels.frame_count(), it->second->length));
        }
        for (Frame f = 1; f <= labels.frame_count(); ++f) {
            if (labels.has(f, Attribute::Day) && labels.has(f, Attribute::Night)) {
                c.add("ATTR_DAY_NIGHT_CONFLICT", labels.sequence_id, {}, f, std::nullopt,
                      "frame flagged both day and night");
            }
        }
    }
    return std::move(c.out);
}

}  // namespace rmot
