#pragma once

#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>

#include "rmot/types.hpp"

namespace rmot::test {

inline BoundingBox box(double x, double y, double w, double h) { return {x, y, w, h}; }

inline Detection det(Frame f, std::int64_t track, BoundingBox b, double conf = 1.0, double ref = 1.0) {
    return {f, b, conf, ref, TrackId{track}};
}

struct TargetSpec {
    Frame frame;
    std::int64_t track;
    BoundingBox b;
};

inline ExpressionTask task(std::initializer_list<TargetSpec> targets, std::string seq = "s", std::string expr = "e") {
    ExpressionTask t;
    t.sequence_id = std::move(seq);
    t.expression_id = std::move(expr);
    t.text = "test";
    for (const auto& s : targets) t.targets[s.frame].emplace(TrackId{s.track}, s.b);
    t.no_target = t.targets.empty();
    return t;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("rmot_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path fixture_dir() { return std::filesystem::path(RMOT_TEST_DATA_DIR); }

}  // namespace rmot::test
