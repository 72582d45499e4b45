#include "rmot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>

#include "rmot/error.hpp"
#include "rmot/rng.hpp"

namespace rmot {

std::int64_t SplitMix64::uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    return std::min(hi, lo + static_cast<std::int64_t>(uniform() * span));
}

SplitMix64 stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    SplitMix64 mix(seed);
    std::uint64_t state = mix.next();
    for (std::uint64_t k : keys) {
        SplitMix64 step(state ^ k);
        state = step.next();
    }
    return SplitMix64(state);
}

namespace {

constexpr std::uint64_t kTagTrack = fnv1a("track");
constexpr std::uint64_t kTagExpression = fnv1a("expression");
constexpr std::uint64_t kTagAttribute = fnv1a("attribute");
constexpr std::uint64_t kTagMiss = fnv1a("miss");
constexpr std::uint64_t kTagSwitch = fnv1a("switch");
constexpr std::uint64_t kTagJitter = fnv1a("jitter");
constexpr std::uint64_t kTagFalsePositive = fnv1a("false-positive");
constexpr std::uint64_t kTagScore = fnv1a("score");

constexpr const char* kSubjects[] = {"cars", "pedestrians", "trucks", "buses", "motorcycles", "bicycles", "vans", "people"};
constexpr const char* kStates[] = {"moving", "parked", "turning left", "turning right", "in the left lane",
                                   "crossing the road", "moving forward", "on the sidewalk", "waiting at the light"};

std::string expression_text(std::int64_t templ) {
    const auto s = static_cast<std::size_t>(templ) % std::size(kSubjects);
    const auto st = (static_cast<std::size_t>(templ) / std::size(kSubjects)) % std::size(kStates);
    const auto rep = templ / static_cast<std::int64_t>(std::size(kSubjects) * std::size(kStates));
    std::string text = fmt::format("{} {}", kSubjects[s], kStates[st]);
    if (rep > 0) text += fmt::format(" in zone {}", rep);
    return text;
}

void check(const ScenarioConfig& c) {
    auto fail = [](const std::string& what) { throw Error("INFEASIBLE_CONFIG", what); };
    if (c.n_sequences < 0 || c.n_tracks < 0 || c.expressions < 0) fail("counts must be non-negative");
    if (c.sequence_length < 1 && c.n_sequences > 0) fail("sequence_length must be >= 1");
    if (c.box_min < 1 || c.box_min > c.box_max) fail("box size range must satisfy 1 <= box_min <= box_max");
    if (c.box_max > c.frame_width || c.box_max > c.frame_height) fail("box larger than the frame");
    if (c.max_step < 0) fail("max_step must be non-negative");
    if (c.expression_templates < 1) fail("expression_templates must be >= 1");
    for (double f : {c.no_target_fraction, c.target_fraction}) {
        if (!(f >= 0.0 && f <= 1.0)) fail("fractions must lie in [0,1]");
    }
}

GroundTruthTrack make_track(const ScenarioConfig& c, std::uint64_t seq_key, std::int64_t id) {
    SplitMix64 rng = stream(c.seed, {kTagTrack, seq_key, static_cast<std::uint64_t>(id)});
    GroundTruthTrack t{TrackId{id}, {}};
    Frame start = 1;
    Frame end = c.sequence_length;
    if (!c.persistent_tracks && c.sequence_length > 1) {
        start = rng.uniform_int(1, c.sequence_length);
        end = rng.uniform_int(1, c.sequence_length);
        if (start > end) std::swap(start, end);
    }
    const std::int64_t w = rng.uniform_int(c.box_min, c.box_max);
    const std::int64_t h = rng.uniform_int(c.box_min, c.box_max);
    std::int64_t x = rng.uniform_int(0, c.frame_width - w);
    std::int64_t y = rng.uniform_int(0, c.frame_height - h);
    std::int64_t vx = rng.uniform_int(-c.max_step, c.max_step);
    std::int64_t vy = rng.uniform_int(-c.max_step, c.max_step);
    for (Frame f = start; f <= end; ++f) {
        t.boxes.emplace(f, BoundingBox{static_cast<double>(x), static_cast<double>(y), static_cast<double>(w),
                                       static_cast<double>(h)});
        x += vx;
        y += vy;
        if (x < 0 || x > c.frame_width - w) {
            x = std::clamp<std::int64_t>(x, 0, c.frame_width - w);
            vx = -vx;
        }
        if (y < 0 || y > c.frame_height - h) {
            y = std::clamp<std::int64_t>(y, 0, c.frame_height - h);
            vy = -vy;
        }
    }
    return t;
}

// Night on odd 8-frame blocks, Day otherwise; each of the other six
// attributes is forced on frame k+1 and otherwise set with probability 0.3.
AttributeFrameLabels make_labels(const ScenarioConfig& c, const std::string& seq_id, std::uint64_t seq_key) {
    AttributeFrameLabels labels{seq_id, std::vector<AttributeSet>(static_cast<std::size_t>(c.sequence_length))};
    constexpr Attribute kIndependent[] = {Attribute::ViewpointChange, Attribute::ScaleVariation, Attribute::Occlusion,
                                          Attribute::FastMotion,      Attribute::Rotation,       Attribute::LowResolution};
    for (Frame f = 1; f <= c.sequence_length; ++f) {
        AttributeSet& set = labels.frames[static_cast<std::size_t>(f - 1)];
        set.set(((f - 1) / 8) % 2 == 1 ? Attribute::Night : Attribute::Day);
        SplitMix64 rng = stream(c.seed, {kTagAttribute, seq_key, static_cast<std::uint64_t>(f)});
        for (std::size_t k = 0; k < std::size(kIndependent); ++k) {
            const bool forced = f == static_cast<Frame>(k) + 1;
            if (forced || rng.uniform() < 0.3) set.set(kIndependent[k]);
        }
    }
    return labels;
}

}  // namespace

std::uint64_t unit_stream_key(const UnitKey& key) { return fnv1a(key.first) ^ (fnv1a(key.second) * 0x9E3779B97F4A7C15ULL); }

Scenario generate_scenario(const ScenarioConfig& cfg) {
    check(cfg);
    Scenario sc;
    for (std::int64_t s = 0; s < cfg.n_sequences; ++s) {
        Sequence seq;
        seq.id = fmt::format("seq{:04d}", s + 1);
        seq.length = cfg.sequence_length;
        const std::uint64_t seq_key = fnv1a(seq.id);
        for (std::int64_t t = 1; t <= cfg.n_tracks; ++t) seq.tracks.push_back(make_track(cfg, seq_key, t));
        sc.dataset.attributes.push_back(make_labels(cfg, seq.id, seq_key));

        for (std::int64_t e = 0; e < cfg.expressions; ++e) {
            SplitMix64 rng = stream(cfg.seed, {kTagExpression, seq_key, static_cast<std::uint64_t>(e)});
            ExpressionTask task;
            task.sequence_id = seq.id;
            task.expression_id = fmt::format("e{:04d}", e + 1);
            task.text = expression_text(rng.uniform_int(0, cfg.expression_templates - 1));

            const bool no_target = seq.tracks.empty() || rng.uniform() < cfg.no_target_fraction;
            if (!no_target) {
                std::vector<const GroundTruthTrack*> chosen;
                for (const GroundTruthTrack& t : seq.tracks) {
                    if (rng.uniform() < cfg.target_fraction) chosen.push_back(&t);
                }
                if (chosen.empty()) chosen.push_back(&seq.tracks[static_cast<std::size_t>(rng.uniform_int(0, cfg.n_tracks - 1))]);
                for (const GroundTruthTrack* t : chosen) {
                    // Inclusive sub-interval of the track's lifetime.
                    const Frame first = t->boxes.begin()->first;
                    const Frame last = t->boxes.rbegin()->first;
                    Frame a = rng.uniform_int(first, last);
                    Frame b = rng.uniform_int(first, last);
                    if (a > b) std::swap(a, b);
                    for (auto it = t->boxes.lower_bound(a); it != t->boxes.end() && it->first <= b; ++it) {
                        task.targets[it->first].emplace(t->track_id, it->second);
                    }
                }
            }
            task.no_target = task.targets.empty();

            std::vector<Detection> perfect;
            for (const auto& [frame, targets] : task.targets) {
                for (const auto& [track, box] : targets) perfect.push_back({frame, box, 1.0, 1.0, track});
            }
            sc.predictions.emplace(UnitKey{task.sequence_id, task.expression_id}, std::move(perfect));
            sc.dataset.expressions.push_back(std::move(task));
        }
        sc.dataset.sequences.push_back(std::move(seq));
    }
    return sc;
}

std::vector<Detection> perturb(std::span<const Detection> preds, const PerturbContext& ctx,
                               const PerturbationConfig& cfg) {
    std::int64_t next_id = 1;
    for (const Detection& d : preds) next_id = std::max(next_id, d.track_id.value + 1);

    // Identity switches: walk each original track in frame order.
    std::map<TrackId, std::vector<std::size_t>> by_track;
    for (std::size_t i = 0; i < preds.size(); ++i) by_track[preds[i].track_id].push_back(i);
    std::vector<TrackId> new_id(preds.size());
    for (auto& [track, idx] : by_track) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return preds[a].frame < preds[b].frame; });
        TrackId current = track;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const Detection& d = preds[idx[k]];
            if (k > 0 && cfg.idswitch_rate > 0.0) {
                SplitMix64 rng = stream(cfg.seed, {kTagSwitch, ctx.unit_key, static_cast<std::uint64_t>(track.value),
                                                   static_cast<std::uint64_t>(d.frame)});
                if (rng.uniform() < cfg.idswitch_rate) current = TrackId{next_id++};
            }
            new_id[idx[k]] = current;
        }
    }

    std::vector<Detection> out;
    out.reserve(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const Detection& d = preds[i];
        const std::uint64_t tk = static_cast<std::uint64_t>(d.track_id.value);
        const std::uint64_t fk = static_cast<std::uint64_t>(d.frame);
        if (cfg.miss_rate > 0.0) {
            SplitMix64 rng = stream(cfg.seed, {kTagMiss, ctx.unit_key, tk, fk});
            if (rng.uniform() < cfg.miss_rate) continue;
        }
        Detection nd = d;
        nd.track_id = new_id[i];
        if (cfg.jitter > 0) {
            SplitMix64 rng = stream(cfg.seed, {kTagJitter, ctx.unit_key, tk, fk});
            const double x1 = d.box.x + static_cast<double>(rng.uniform_int(-cfg.jitter, cfg.jitter));
            const double y1 = d.box.y + static_cast<double>(rng.uniform_int(-cfg.jitter, cfg.jitter));
            const double x2 = d.box.x + d.box.w + static_cast<double>(rng.uniform_int(-cfg.jitter, cfg.jitter));
            const double y2 = d.box.y + d.box.h + static_cast<double>(rng.uniform_int(-cfg.jitter, cfg.jitter));
            nd.box = {x1, y1, std::max(0.0, x2 - x1), std::max(0.0, y2 - y1)};
        }
        if (cfg.confidence_range || cfg.referring_range) {
            SplitMix64 rng = stream(cfg.seed, {kTagScore, ctx.unit_key, tk, fk});
            const double u1 = rng.uniform();
            const double u2 = rng.uniform();
            if (cfg.confidence_range) {
                nd.confidence = cfg.confidence_range->first + u1 * (cfg.confidence_range->second - cfg.confidence_range->first);
            }
            if (cfg.referring_range) {
                nd.referring_score = cfg.referring_range->first + u2 * (cfg.referring_range->second - cfg.referring_range->first);
            }
        }
        out.push_back(nd);
    }

    if (cfg.fp_rate > 0.0 && ctx.frame_width >= cfg.fp_box_max && ctx.frame_height >= cfg.fp_box_max) {
        const double limit = std::exp(-cfg.fp_rate);
        for (Frame f = 1; f <= ctx.sequence_length; ++f) {
            SplitMix64 rng = stream(cfg.seed, {kTagFalsePositive, ctx.unit_key, static_cast<std::uint64_t>(f)});
            // Knuth's product-of-uniforms Poisson draw.
            std::int64_t count = 0;
            for (double p = rng.uniform(); p > limit; p *= rng.uniform()) ++count;
            for (std::int64_t k = 0; k < count; ++k) {
                const std::int64_t w = rng.uniform_int(cfg.fp_box_min, cfg.fp_box_max);
                const std::int64_t h = rng.uniform_int(cfg.fp_box_min, cfg.fp_box_max);
                const std::int64_t x = rng.uniform_int(0, ctx.frame_width - w);
                const std::int64_t y = rng.uniform_int(0, ctx.frame_height - h);
                const double conf = cfg.fp_confidence_range.first +
                                    rng.uniform() * (cfg.fp_confidence_range.second - cfg.fp_confidence_range.first);
                const double ref = cfg.fp_referring_range.first +
                                   rng.uniform() * (cfg.fp_referring_range.second - cfg.fp_referring_range.first);
                out.push_back({f,
                               {static_cast<double>(x), static_cast<double>(y), static_cast<double>(w), static_cast<double>(h)},
                               conf,
                               ref,
                               TrackId{next_id++}});
            }
        }
    }
    return out;
}

PredictionSet perturb_all(const Scenario& scenario, const ScenarioConfig& scfg, const PerturbationConfig& cfg) {
    PredictionSet out;
    for (const auto& [key, dets] : scenario.predictions) {
        const Sequence* seq = scenario.dataset.find_sequence(key.first);
        const PerturbContext ctx{unit_stream_key(key), seq ? seq->length : 0, scfg.frame_width, scfg.frame_height};
        out.emplace(key, perturb(dets, ctx, cfg));
    }
    return out;
}

}  // namespace rmot
