#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rmot/types.hpp"

namespace rmot {

/// The sub-problem on frames where `attr` is set. Frame numbers are kept.
/// Throws rmot::Error(UNKNOWN_ATTRIBUTE) for out-of-range enum values.
std::pair<ExpressionTask, std::vector<Detection>> restrict_to_attribute(const ExpressionTask& task,
                                                                        std::span<const Detection> preds,
                                                                        const AttributeFrameLabels& labels,
                                                                        Attribute attr);

/// Geometric mean (prod v_i)^(1/N) of values in [0,100]. Throws
/// rmot::Error(EMPTY_COMPOSITE) on an empty list, VALUE_RANGE otherwise.
double compose_geometric(std::span<const double> values);

}  // namespace rmot
