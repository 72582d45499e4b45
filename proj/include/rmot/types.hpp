#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rmot {

/// Frame indices are 1-based everywhere.
using Frame = std::int64_t;

/// Opaque track identifier. Only equality and ordering are meaningful.
struct TrackId {
    std::int64_t value = 0;

    friend constexpr auto operator<=>(TrackId, TrackId) = default;
};

/// Axis-aligned box in pixels, (x, y) is the top-left corner.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w > 0.0 && h > 0.0 ? w * h : 0.0; }
    bool valid() const { return w >= 0.0 && h >= 0.0; }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Detection {
    Frame frame = 1;
    BoundingBox box;
    double confidence = 1.0;
    double referring_score = 1.0;
    TrackId track_id;

    friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruthTrack {
    TrackId track_id;
    std::map<Frame, BoundingBox> boxes;

    friend bool operator==(const GroundTruthTrack&, const GroundTruthTrack&) = default;
};

/// Per-frame target boxes of one expression, keyed by track.
using FrameTargets = std::map<TrackId, BoundingBox>;

/// One (sequence, expression) evaluation unit.
struct ExpressionTask {
    std::string sequence_id;
    std::string expression_id;
    std::string text;
    std::map<Frame, FrameTargets> targets;
    bool no_target = false;

    /// Number of frames carrying at least one target box.
    std::size_t active_frames() const;

    friend bool operator==(const ExpressionTask&, const ExpressionTask&) = default;
};

enum class Attribute : std::uint8_t {
    Day = 0,
    Night,
    ViewpointChange,
    ScaleVariation,
    Occlusion,
    FastMotion,
    Rotation,
    LowResolution,
};

inline constexpr std::size_t kAttributeCount = 8;

inline constexpr std::array<Attribute, kAttributeCount> kAllAttributes = {
    Attribute::Day,      Attribute::Night,      Attribute::ViewpointChange,
    Attribute::ScaleVariation, Attribute::Occlusion, Attribute::FastMotion,
    Attribute::Rotation, Attribute::LowResolution,
};

/// Stable snake_case name, also used as the attribute file column header.
std::string_view attribute_name(Attribute a);
std::optional<Attribute> attribute_from_name(std::string_view name);

/// Set of attribute flags on one frame.
class AttributeSet {
public:
    constexpr AttributeSet() = default;

    constexpr bool has(Attribute a) const { return (bits_ >> static_cast<unsigned>(a)) & 1U; }
    constexpr void set(Attribute a, bool on = true) {
        const auto mask = static_cast<std::uint8_t>(1U << static_cast<unsigned>(a));
        bits_ = on ? static_cast<std::uint8_t>(bits_ | mask) : static_cast<std::uint8_t>(bits_ & ~mask);
    }
    constexpr std::uint8_t bits() const { return bits_; }

    friend constexpr bool operator==(AttributeSet, AttributeSet) = default;

private:
    std::uint8_t bits_ = 0;
};

/// Per-frame challenge attributes of one sequence. Index 0 holds frame 1.
struct AttributeFrameLabels {
    std::string sequence_id;
    std::vector<AttributeSet> frames;

    Frame frame_count() const { return static_cast<Frame>(frames.size()); }
    bool covers(Frame f) const { return f >= 1 && f <= frame_count(); }
    bool has(Frame f, Attribute a) const { return covers(f) && frames[static_cast<std::size_t>(f - 1)].has(a); }

    friend bool operator==(const AttributeFrameLabels&, const AttributeFrameLabels&) = default;
};

enum class Split : std::uint8_t { Unspecified, Train, InDomainTest, CrossDomainTest };

std::string_view split_name(Split s);
std::optional<Split> split_from_name(std::string_view name);

struct Sequence {
    std::string id;
    Frame length = 0;
    Split split = Split::Unspecified;
    std::vector<GroundTruthTrack> tracks;

    friend bool operator==(const Sequence&, const Sequence&) = default;
};

/// Sequences, expression units and attribute labels of one benchmark (or split).
struct Dataset {
    std::vector<Sequence> sequences;
    std::vector<ExpressionTask> expressions;
    std::vector<AttributeFrameLabels> attributes;

    const Sequence* find_sequence(std::string_view id) const;
    const AttributeFrameLabels* find_attributes(std::string_view id) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct EvalConfig {
    double score_threshold = 0.5;
    double beta_ref = 0.4;
    std::vector<double> alpha_grid = default_alpha_grid();
    std::vector<Attribute> scene_attributes = {Attribute::Night, Attribute::Occlusion, Attribute::LowResolution};
    std::vector<Attribute> motion_attributes = {Attribute::ViewpointChange, Attribute::ScaleVariation,
                                                Attribute::FastMotion, Attribute::Rotation};

    /// 0.05, 0.10, ..., 0.95.
    static std::vector<double> default_alpha_grid();

    /// Throws rmot::Error(INVALID_CONFIG) when thresholds or the grid are out of range.
    void validate() const;

    friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

}  // namespace rmot
