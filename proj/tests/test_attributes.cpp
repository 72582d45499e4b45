#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rmot/attributes.hpp"
#include "rmot/error.hpp"
#include "rmot/evaluation.hpp"
#include "support.hpp"

using namespace rmot;
using rmot::test::box;
using rmot::test::det;
using rmot::test::task;

namespace {

AttributeFrameLabels labels_with(Attribute a, std::initializer_list<Frame> frames, std::size_t length) {
    AttributeFrameLabels l{"s", std::vector<AttributeSet>(length)};
    for (Frame f : frames) l.frames[static_cast<std::size_t>(f - 1)].set(a);
    return l;
}

double to_percent_2dp(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

TEST_CASE("restrict_to_attribute: all, none, subset") {
    const auto t = task({{1, 1, box(0, 0, 4, 4)}, {2, 1, box(1, 0, 4, 4)}, {3, 1, box(2, 0, 4, 4)},
                         {4, 1, box(3, 0, 4, 4)}});
    const std::vector<Detection> preds = {det(1, 1, box(0, 0, 4, 4)), det(2, 1, box(1, 0, 4, 4)),
                                          det(3, 2, box(2, 0, 4, 4)), det(4, 1, box(3, 0, 4, 4))};

    SUBCASE("every frame flagged") {
        const auto [rt, rp] = restrict_to_attribute(t, preds, labels_with(Attribute::Night, {1, 2, 3, 4}, 4),
                                                    Attribute::Night);
        CHECK(rt.targets == t.targets);
        CHECK(rp == preds);
    }
    SUBCASE("no frame flagged") {
        const auto [rt, rp] = restrict_to_attribute(t, preds, labels_with(Attribute::Night, {}, 4), Attribute::Night);
        CHECK(rt.targets.empty());
        CHECK(rp.empty());
    }
    SUBCASE("frames 1 and 3 keep their numbers") {
        const auto [rt, rp] = restrict_to_attribute(t, preds, labels_with(Attribute::Occlusion, {1, 3}, 4),
                                                    Attribute::Occlusion);
        REQUIRE(rt.targets.size() == 2);
        CHECK(rt.targets.count(1) == 1);
        CHECK(rt.targets.count(3) == 1);
        REQUIRE(rp.size() == 2);
        CHECK(rp[0].frame == 1);
        CHECK(rp[1].frame == 3);
    }
    SUBCASE("unknown attribute") {
        CHECK_THROWS_AS(restrict_to_attribute(t, preds, labels_with(Attribute::Night, {}, 4), static_cast<Attribute>(42)),
                        Error);
    }
}

TEST_CASE("compose_geometric: published attribute rows") {
    const std::vector<double> hetrack_s = {30.16, 25.80, 26.82};
    const std::vector<double> hetrack_m = {33.57, 26.23, 31.10, 37.96};
    const std::vector<double> transrmot_s = {23.00, 28.59, 22.28};
    const std::vector<double> transrmot_m = {31.61, 22.28, 24.05, 24.69};
    CHECK(std::abs(compose_geometric(hetrack_s) - 27.53) <= 0.01);
    CHECK(std::abs(compose_geometric(hetrack_m) - 31.93) <= 0.01);
    CHECK(std::abs(compose_geometric(transrmot_s) - 24.47) <= 0.01);
    CHECK(std::abs(compose_geometric(transrmot_m) - 25.43) <= 0.01);
    CHECK(to_percent_2dp(compose_geometric(hetrack_s)) == 27.53);
    CHECK(to_percent_2dp(compose_geometric(hetrack_m)) == 31.93);
}

TEST_CASE("compose_geometric: identity, annihilator, errors") {
    const std::vector<double> one = {42.5};
    CHECK(compose_geometric(one) == 42.5);
    const std::vector<double> with_zero = {10.0, 0.0, 90.0};
    CHECK(compose_geometric(with_zero) == 0.0);
    CHECK_THROWS_AS(compose_geometric(std::vector<double>{}), Error);
    CHECK_THROWS_AS(compose_geometric(std::vector<double>{50.0, 100.5}), Error);
    CHECK_THROWS_AS(compose_geometric(std::vector<double>{-1.0}), Error);
}

TEST_CASE("compose_geometric: order, bounds, constant lists, monotonicity") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.5, 100.0);
    std::uniform_int_distribution<int> len(1, 6);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> v(static_cast<std::size_t>(len(gen)));
        for (double& x : v) x = u(gen);
        const double g = compose_geometric(v);
        CHECK(g >= *std::min_element(v.begin(), v.end()) * (1 - 1e-12));
        CHECK(g <= *std::max_element(v.begin(), v.end()) * (1 + 1e-12));
        std::vector<double> p = v;
        std::shuffle(p.begin(), p.end(), gen);
        CHECK(compose_geometric(p) == doctest::Approx(g).epsilon(1e-12));

        std::vector<double> bumped = v;
        bumped[0] = std::min(100.0, bumped[0] + 0.25);
        if (bumped[0] > v[0]) CHECK(compose_geometric(bumped) > g);

        const std::vector<double> same(v.size(), v[0]);
        CHECK(compose_geometric(same) == doctest::Approx(v[0]).epsilon(1e-14));
    }
}

namespace {

// Two frames: Day on frame 1, Night on frame 2; one target track.
Dataset day_night_dataset() {
    Dataset ds;
    ds.sequences.push_back({"s", 2, Split::Train, {}});
    ds.expressions.push_back(task({{1, 1, box(0, 0, 10, 10)}, {2, 1, box(1, 0, 10, 10)}}, "s", "e"));
    AttributeFrameLabels l{"s", std::vector<AttributeSet>(2)};
    l.frames[0].set(Attribute::Day);
    l.frames[1].set(Attribute::Night);
    l.frames[1].set(Attribute::Occlusion);
    ds.attributes.push_back(l);
    return ds;
}

}  // namespace

TEST_CASE("attribute_hota: perfect on Day, nothing on Night") {
    const Dataset ds = day_night_dataset();
    PredictionSet preds;
    preds[{"s", "e"}] = {det(1, 1, box(0, 0, 10, 10))};
    const EvalConfig cfg;
    CHECK(attribute_hota(ds, preds, Attribute::Day, cfg) == 1.0);
    CHECK(attribute_hota(ds, preds, Attribute::Night, cfg) == 0.0);
    CHECK_FALSE(attribute_hota(ds, preds, Attribute::FastMotion, cfg).has_value());

    const EvaluationResult r = evaluate(ds, preds, cfg);
    REQUIRE(r.attributes.has_value());
    const AttributeReport& a = *r.attributes;
    CHECK(a.frame_counts[static_cast<std::size_t>(Attribute::Day)] == 1);
    CHECK(a.frame_counts[static_cast<std::size_t>(Attribute::Night)] == 1);
    // Night and Occlusion present, LowResolution absent: N = 2.
    CHECK(a.n_s == 2);
    REQUIRE(a.hota_s.has_value());
    CHECK(*a.hota_s == 0.0);
    CHECK(a.n_m == 0);
    CHECK_FALSE(a.hota_m.has_value());
    CHECK_FALSE(a.warnings.empty());
}

TEST_CASE("attribute_hota: perfect predictions score 1 on every present attribute") {
    Dataset ds = day_night_dataset();
    PredictionSet preds;
    preds[{"s", "e"}] = {det(1, 1, box(0, 0, 10, 10)), det(2, 1, box(1, 0, 10, 10))};
    const EvaluationResult r = evaluate(ds, preds, EvalConfig{});
    REQUIRE(r.attributes.has_value());
    for (Attribute attr : kAllAttributes) {
        const auto& h = r.attributes->hota[static_cast<std::size_t>(attr)];
        if (r.attributes->frame_counts[static_cast<std::size_t>(attr)] > 0) {
            REQUIRE(h.has_value());
            CHECK(*h == 1.0);
        } else {
            CHECK_FALSE(h.has_value());
        }
    }
    CHECK(r.attributes->hota_s == 1.0);
}

TEST_CASE("composites lie between their constituents") {
    // Frames 1-8 with every attribute on some frames; predictions degraded on a few frames.
    Dataset ds;
    ds.sequences.push_back({"s", 8, Split::Train, {}});
    ExpressionTask t;
    t.sequence_id = "s";
    t.expression_id = "e";
    std::vector<Detection> preds;
    for (Frame f = 1; f <= 8; ++f) {
        const auto x = static_cast<double>(f);
        t.targets[f].emplace(TrackId{1}, box(x, 0, 10, 10));
        if (f % 3 != 0) preds.push_back(det(f, f < 5 ? 1 : 2, box(x + 1, 0, 10, 10)));
    }
    ds.expressions.push_back(t);
    AttributeFrameLabels l{"s", std::vector<AttributeSet>(8)};
    for (std::size_t i = 0; i < 8; ++i) {
        l.frames[i].set(i % 2 == 0 ? Attribute::Day : Attribute::Night);
        for (Attribute a : {Attribute::ViewpointChange, Attribute::ScaleVariation, Attribute::Occlusion,
                            Attribute::FastMotion, Attribute::Rotation, Attribute::LowResolution}) {
            if ((i + static_cast<std::size_t>(a)) % 3 != 0) l.frames[i].set(a);
        }
    }
    ds.attributes.push_back(l);
    PredictionSet ps;
    ps[{"s", "e"}] = preds;
    const EvaluationResult r = evaluate(ds, ps, EvalConfig{});
    REQUIRE(r.attributes.has_value());
    const AttributeReport& a = *r.attributes;
    CHECK(a.n_s == 3);
    CHECK(a.n_m == 4);
    auto bounds = [&](std::initializer_list<Attribute> set, double composite) {
        double lo = 1.0, hi = 0.0;
        for (Attribute at : set) {
            const double v = *a.hota[static_cast<std::size_t>(at)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(composite >= lo - 1e-12);
        CHECK(composite <= hi + 1e-12);
    };
    bounds({Attribute::Night, Attribute::Occlusion, Attribute::LowResolution}, *a.hota_s);
    bounds({Attribute::ViewpointChange, Attribute::ScaleVariation, Attribute::FastMotion, Attribute::Rotation},
           *a.hota_m);
}
