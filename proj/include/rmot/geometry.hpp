#pragma once

#include <span>
#include <vector>

#include "rmot/types.hpp"

namespace rmot {

/// Intersection over union. Zero when the union has no area.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Keeps detections with confidence >= score_threshold and
/// referring_score >= beta_ref, in input order.
std::vector<Detection> filter_predictions(std::span<const Detection> dets, const EvalConfig& cfg);

}  // namespace rmot
