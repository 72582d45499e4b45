#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "rmot/evaluation.hpp"
#include "rmot/types.hpp"

namespace rmot {

struct ScenarioConfig {
    std::uint64_t seed = 1;
    std::int64_t n_sequences = 1;
    Frame sequence_length = 50;
    std::int64_t n_tracks = 5;
    std::int64_t frame_width = 1920;
    std::int64_t frame_height = 1080;
    std::int64_t box_min = 20;
    std::int64_t box_max = 80;
    /// Per-frame velocity components are drawn from [-max_step, max_step].
    std::int64_t max_step = 4;
    /// Tracks span the whole sequence instead of a random sub-interval.
    bool persistent_tracks = false;
    /// Expressions per sequence.
    std::int64_t expressions = 4;
    /// Number of distinct expression texts cycled through.
    std::int64_t expression_templates = 8;
    double no_target_fraction = 0.1;
    /// Probability that each track is a target of a (targeted) expression.
    double target_fraction = 0.3;
};

struct PerturbationConfig {
    std::uint64_t seed = 1;
    double miss_rate = 0.0;
    /// Expected false positives per frame (Poisson).
    double fp_rate = 0.0;
    /// Per-track, per-frame probability of switching to a fresh id.
    double idswitch_rate = 0.0;
    /// Each box edge moves by an integer offset in [-jitter, jitter].
    std::int64_t jitter = 0;
    /// When set, scores of kept detections are resampled uniformly in range.
    std::optional<std::pair<double, double>> confidence_range;
    std::optional<std::pair<double, double>> referring_range;
    /// Scores given to injected false positives.
    std::pair<double, double> fp_confidence_range{1.0, 1.0};
    std::pair<double, double> fp_referring_range{1.0, 1.0};
    std::int64_t fp_box_min = 20;
    std::int64_t fp_box_max = 80;
};

/// Where a unit's predictions live; FP injection needs the frame range and size.
struct PerturbContext {
    std::uint64_t unit_key = 0;
    Frame sequence_length = 0;
    std::int64_t frame_width = 0;
    std::int64_t frame_height = 0;
};

struct Scenario {
    Dataset dataset;
    /// Perfect predictions: gt target boxes, scores 1, gt track ids.
    PredictionSet predictions;
};

/// Deterministic in cfg.seed. Throws rmot::Error(INFEASIBLE_CONFIG).
Scenario generate_scenario(const ScenarioConfig& cfg);

std::uint64_t unit_stream_key(const UnitKey& key);

/// Deterministic in cfg.seed and ctx.unit_key. All-zero rates are the identity.
std::vector<Detection> perturb(std::span<const Detection> preds, const PerturbContext& ctx,
                               const PerturbationConfig& cfg);

/// perturb applied to every unit of a scenario.
PredictionSet perturb_all(const Scenario& scenario, const ScenarioConfig& scfg, const PerturbationConfig& cfg);

}  // namespace rmot
