#include "rmot/types.hpp"

#include <cmath>
#include <fmt/format.h>

#include "rmot/error.hpp"

namespace rmot {

Error::Error(std::string code, const std::string& message, std::string file, std::size_t line)
    : std::runtime_error(file.empty() ? fmt::format("{}: {}", code, message)
                         : line == 0  ? fmt::format("{}: {}: {}", file, code, message)
                                      : fmt::format("{}:{}: {}: {}", file, line, code, message)),
      code_(std::move(code)),
      file_(std::move(file)),
      line_(line) {}

std::size_t ExpressionTask::active_frames() const {
    std::size_t n = 0;
    for (const auto& [frame, boxes] : targets) {
        if (!boxes.empty()) ++n;
    }
    return n;
}

const Sequence* Dataset::find_sequence(std::string_view id) const {
    for (const Sequence& s : sequences) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

const AttributeFrameLabels* Dataset::find_attributes(std::string_view id) const {
    for (const AttributeFrameLabels& a : attributes) {
        if (a.sequence_id == id) return &a;
    }
    return nullptr;
}

namespace {

constexpr std::string_view kAttributeNames[kAttributeCount] = {
    "day", "night", "viewpoint_change", "scale_variation", "occlusion", "fast_motion", "rotation", "low_resolution",
};

}  // namespace

std::string_view attribute_name(Attribute a) { return kAttributeNames[static_cast<std::size_t>(a)]; }

std::optional<Attribute> attribute_from_name(std::string_view name) {
    for (Attribute a : kAllAttributes) {
        if (attribute_name(a) == name) return a;
    }
    return std::nullopt;
}

std::string_view split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::InDomainTest: return "in-domain-test";
        case Split::CrossDomainTest: return "cross-domain-test";
        case Split::Unspecified: break;
    }
    return "unspecified";
}

std::optional<Split> split_from_name(std::string_view name) {
    for (Split s : {Split::Unspecified, Split::Train, Split::InDomainTest, Split::CrossDomainTest}) {
        if (split_name(s) == name) return s;
    }
    return std::nullopt;
}

std::vector<double> EvalConfig::default_alpha_grid() {
    std::vector<double> grid;
    grid.reserve(19);
    // k / 20 rather than repeated addition so every value is the nearest double.
    for (int k = 1; k <= 19; ++k) grid.push_back(static_cast<double>(k) / 20.0);
    return grid;
}

void EvalConfig::validate() const {
    auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!unit(score_threshold)) throw Error("INVALID_CONFIG", fmt::format("score threshold {} outside [0,1]", score_threshold));
    if (!unit(beta_ref)) throw Error("INVALID_CONFIG", fmt::format("beta_ref {} outside [0,1]", beta_ref));
    if (alpha_grid.empty()) throw Error("INVALID_CONFIG", "alpha grid is empty");
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        const double a = alpha_grid[i];
        if (!(a > 0.0 && a < 1.0)) throw Error("INVALID_CONFIG", fmt::format("alpha {} outside (0,1)", a));
        if (i > 0 && !(a > alpha_grid[i - 1])) throw Error("INVALID_CONFIG", "alpha grid must be strictly increasing");
    }
}

}  // namespace rmot
