#include "rmot/geometry.hpp"

#include <algorithm>

namespace rmot {

double iou(const BoundingBox& a, const BoundingBox& b) {
    const double area_a = a.area();
    const double area_b = b.area();
    const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
    const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
    const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
    const double uni = area_a + area_b - inter;
    if (!(uni > 0.0)) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Detection> filter_predictions(std::span<const Detection> dets, const EvalConfig& cfg) {
    std::vector<Detection> kept;
    kept.reserve(dets.size());
    std::copy_if(dets.begin(), dets.end(), std::back_inserter(kept), [&](const Detection& d) {
        return d.confidence >= cfg.score_threshold && d.referring_score >= cfg.beta_ref;
    });
    return kept;
}

}  // namespace rmot
