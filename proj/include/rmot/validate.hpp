#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmot/types.hpp"

namespace rmot {

/// One broken dataset invariant. Codes are stable strings:
///   ATTR_DAY_NIGHT_CONFLICT, ATTR_MISSING_FRAMES, ATTR_UNKNOWN_SEQUENCE,
///   NEGATIVE_EXTENT, NON_FINITE_BOX, FRAME_OUT_OF_BOUNDS,
///   NO_TARGET_INCONSISTENT, UNKNOWN_SEQUENCE, DUPLICATE_EXPRESSION,
///   DUPLICATE_SEQUENCE, DUPLICATE_TRACK, EMPTY_SEQUENCE.
struct Violation {
    std::string code;
    std::string sequence_id;
    std::string expression_id;
    std::optional<Frame> frame;
    std::optional<TrackId> track;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Collects every violation; never stops at the first one.
std::vector<Violation> validate_dataset(std::span<const Sequence> sequences,
                                        std::span<const ExpressionTask> expressions,
                                        std::span<const AttributeFrameLabels> attributes);

}  // namespace rmot
