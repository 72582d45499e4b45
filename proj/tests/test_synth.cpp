#include <doctest.h>

#include <set>

#include "rmot/error.hpp"
#include "rmot/evaluation.hpp"
#include "rmot/rng.hpp"
#include "rmot/synth.hpp"
#include "rmot/validate.hpp"
#include "support.hpp"

using namespace rmot;
using rmot::test::box;
using rmot::test::det;

namespace {

// 100 frames x 10 tracks of fixed boxes.
std::vector<Detection> thousand_detections() {
    std::vector<Detection> out;
    for (Frame f = 1; f <= 100; ++f) {
        for (std::int64_t t = 1; t <= 10; ++t) {
            out.push_back(det(f, t, box(static_cast<double>(t) * 100.0, 50, 40, 40)));
        }
    }
    return out;
}

const PerturbContext kCtx{12345, 100, 1920, 1080};

ScenarioConfig small_config(std::uint64_t seed) {
    ScenarioConfig c;
    c.seed = seed;
    c.n_sequences = 2;
    c.sequence_length = 40;
    c.n_tracks = 6;
    c.expressions = 5;
    return c;
}

}  // namespace

TEST_CASE("SplitMix64 reference outputs") {
    // First outputs for seed 0 as published with the algorithm.
    SplitMix64 g(0);
    CHECK(g.next() == 0xe220a8397b1dcdafULL);
    CHECK(g.next() == 0x6e789e6aa1b965f4ULL);
    CHECK(g.next() == 0x06c45d188009454fULL);
}

TEST_CASE("generate_scenario: deterministic in seed") {
    const Scenario a = generate_scenario(small_config(9));
    const Scenario b = generate_scenario(small_config(9));
    CHECK(a.dataset.expressions.size() == b.dataset.expressions.size());
    CHECK(a.predictions == b.predictions);
    for (std::size_t i = 0; i < a.dataset.sequences.size(); ++i) {
        CHECK(a.dataset.sequences[i].tracks == b.dataset.sequences[i].tracks);
    }
    const Scenario c = generate_scenario(small_config(10));
    CHECK(c.predictions != a.predictions);
}

TEST_CASE("generate_scenario: valid data, boxes inside the frame, every attribute present") {
    const ScenarioConfig cfg = small_config(3);
    const Scenario s = generate_scenario(cfg);
    CHECK(validate_dataset(s.dataset.sequences, s.dataset.expressions, s.dataset.attributes).empty());
    for (const Sequence& seq : s.dataset.sequences) {
        for (const GroundTruthTrack& t : seq.tracks) {
            for (const auto& [f, b] : t.boxes) {
                CHECK(b.x >= 0);
                CHECK(b.y >= 0);
                CHECK(b.x + b.w <= static_cast<double>(cfg.frame_width));
                CHECK(b.y + b.h <= static_cast<double>(cfg.frame_height));
            }
        }
    }
    for (const AttributeFrameLabels& l : s.dataset.attributes) {
        for (Attribute a : kAllAttributes) {
            bool seen = false;
            for (Frame f = 1; f <= l.frame_count(); ++f) seen = seen || l.has(f, a);
            CHECK(seen);
        }
    }
}

TEST_CASE("generate_scenario: zero tracks and infeasible configs") {
    ScenarioConfig cfg = small_config(1);
    cfg.n_tracks = 0;
    const Scenario s = generate_scenario(cfg);
    for (const Sequence& seq : s.dataset.sequences) CHECK(seq.tracks.empty());
    for (const auto& [key, dets] : s.predictions) CHECK(dets.empty());

    cfg = small_config(1);
    cfg.box_max = 5000;
    CHECK_THROWS_AS(generate_scenario(cfg), Error);
    cfg = small_config(1);
    cfg.no_target_fraction = 1.5;
    CHECK_THROWS_AS(generate_scenario(cfg), Error);
}

TEST_CASE("generate_scenario: perfect predictions score 1") {
    const Scenario s = generate_scenario(small_config(4));
    const EvaluationResult r = evaluate(s.dataset, s.predictions, EvalConfig{});
    CHECK(r.overall.hota == 1.0);
    CHECK(r.overall.det_a == 1.0);
    CHECK(r.overall.ass_a == 1.0);
    REQUIRE(r.attributes.has_value());
    CHECK(r.attributes->hota_s == 1.0);
    CHECK(r.attributes->hota_m == 1.0);
}

TEST_CASE("perturb: zero rates are the identity") {
    const auto in = thousand_detections();
    PerturbationConfig cfg;
    cfg.seed = 77;
    CHECK(perturb(in, kCtx, cfg) == in);
}

TEST_CASE("perturb: miss_rate 1 drops everything") {
    PerturbationConfig cfg;
    cfg.miss_rate = 1.0;
    CHECK(perturb(thousand_detections(), kCtx, cfg).empty());
}

TEST_CASE("perturb: seeded miss_rate 0.5 on 1000 detections") {
    PerturbationConfig cfg;
    cfg.seed = 2024;
    cfg.miss_rate = 0.5;
    const auto out = perturb(thousand_detections(), kCtx, cfg);
    // Frozen from the first run.
    CHECK(out.size() == 505);
    CHECK(perturb(thousand_detections(), kCtx, cfg) == out);
}

TEST_CASE("perturb: jitter stays within bounds, id switches use fresh ids") {
    const auto in = thousand_detections();
    PerturbationConfig cfg;
    cfg.seed = 5;
    cfg.jitter = 3;
    cfg.idswitch_rate = 0.05;
    const auto out = perturb(in, kCtx, cfg);
    REQUIRE(out.size() == in.size());
    std::set<std::int64_t> ids;
    for (std::size_t i = 0; i < in.size(); ++i) {
        CHECK(out[i].frame == in[i].frame);
        CHECK(std::abs(out[i].box.x - in[i].box.x) <= 3);
        CHECK(std::abs((out[i].box.x + out[i].box.w) - (in[i].box.x + in[i].box.w)) <= 3);
        ids.insert(out[i].track_id.value);
    }
    CHECK(ids.size() > 10);
}

TEST_CASE("perturb: false positives come at the configured rate") {
    PerturbationConfig cfg;
    cfg.seed = 8;
    cfg.fp_rate = 2.0;
    const auto in = thousand_detections();
    const auto out = perturb(in, kCtx, cfg);
    const auto extra = static_cast<double>(out.size() - in.size());
    CHECK(extra > 150);
    CHECK(extra < 250);
}

TEST_CASE("DetRe does not increase with miss_rate") {
    const ScenarioConfig scfg = small_config(21);
    const Scenario s = generate_scenario(scfg);
    double prev = 2.0;
    for (double miss : {0.0, 0.2, 0.5, 0.8}) {
        PerturbationConfig p;
        p.seed = 99;
        p.miss_rate = miss;
        const EvaluationResult r = evaluate(s.dataset, perturb_all(s, scfg, p), EvalConfig{});
        CHECK(r.overall.det_re <= prev);
        prev = r.overall.det_re;
    }
}

TEST_CASE("ID-switch-only perturbation keeps DetA and does not raise AssA") {
    const ScenarioConfig scfg = small_config(22);
    const Scenario s = generate_scenario(scfg);
    PerturbationConfig p;
    p.seed = 4;
    p.idswitch_rate = 0.05;
    const EvaluationResult base = evaluate(s.dataset, s.predictions, EvalConfig{});
    const EvaluationResult sw = evaluate(s.dataset, perturb_all(s, scfg, p), EvalConfig{});
    for (std::size_t k = 0; k < base.overall.per_alpha.size(); ++k) {
        CHECK(sw.overall.per_alpha[k].det_a == doctest::Approx(base.overall.per_alpha[k].det_a).epsilon(1e-9));
    }
    CHECK(sw.overall.ass_a <= base.overall.ass_a);
    CHECK(sw.overall.ass_a < 1.0);
}
