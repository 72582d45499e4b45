#include "rmot/attributes.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "rmot/error.hpp"

namespace rmot {

std::pair<ExpressionTask, std::vector<Detection>> restrict_to_attribute(const ExpressionTask& task,
                                                                        std::span<const Detection> preds,
                                                                        const AttributeFrameLabels& labels,
                                                                        Attribute attr) {
    if (static_cast<std::size_t>(attr) >= kAttributeCount) {
        throw Error("UNKNOWN_ATTRIBUTE", fmt::format("attribute index {}", static_cast<unsigned>(attr)));
    }
    ExpressionTask sub;
    sub.sequence_id = task.sequence_id;
    sub.expression_id = task.expression_id;
    sub.text = task.text;
    sub.no_target = task.no_target;
    for (const auto& [frame, targets] : task.targets) {
        if (labels.has(frame, attr)) sub.targets.emplace(frame, targets);
    }
    std::vector<Detection> kept;
    std::copy_if(preds.begin(), preds.end(), std::back_inserter(kept),
                 [&](const Detection& d) { return labels.has(d.frame, attr); });
    return {std::move(sub), std::move(kept)};
}

double compose_geometric(std::span<const double> values) {
    if (values.empty()) throw Error("EMPTY_COMPOSITE", "no values to compose");
    for (double v : values) {
        if (!(v >= 0.0 && v <= 100.0)) throw Error("VALUE_RANGE", fmt::format("composite input {} outside [0,100]", v));
    }
    const double top = *std::max_element(values.begin(), values.end());
    if (top == 0.0) return 0.0;
    // Normalizing by the maximum keeps the product in range for any N and
    // returns x exactly when every input equals x.
    double product = 1.0;
    for (double v : values) product *= v / top;
    return top * std::pow(product, 1.0 / static_cast<double>(values.size()));
}

}  // namespace rmot
