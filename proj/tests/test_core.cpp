#include <doctest.h>

#include <random>

#include "rmot/error.hpp"
#include "rmot/geometry.hpp"
#include "rmot/validate.hpp"
#include "support.hpp"

using namespace rmot;
using rmot::test::box;
using rmot::test::det;

TEST_CASE("iou: identity, disjoint, partial overlap") {
    CHECK(iou(box(0, 0, 10, 10), box(0, 0, 10, 10)) == 1.0);
    CHECK(iou(box(0, 0, 5, 5), box(100, 100, 5, 5)) == 0.0);
    // intersection 2, union 6
    CHECK(iou(box(0, 0, 2, 2), box(1, 0, 2, 2)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("iou: degenerate boxes score zero") {
    CHECK(iou(box(0, 0, 0, 0), box(0, 0, 0, 0)) == 0.0);
    CHECK(iou(box(0, 0, 0, 10), box(0, 0, 10, 10)) == 0.0);
    CHECK(iou(box(5, 5, 10, 0), box(5, 5, 10, 0)) == 0.0);
    // touching edges have no intersection
    CHECK(iou(box(0, 0, 5, 5), box(5, 0, 5, 5)) == 0.0);
}

TEST_CASE("iou: symmetric, scale and translation invariant") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> pos(-50.0, 50.0), ext(0.0, 40.0), scale(0.1, 20.0);
    for (int i = 0; i < 2000; ++i) {
        const BoundingBox a = box(pos(gen), pos(gen), ext(gen), ext(gen));
        const BoundingBox b = box(pos(gen), pos(gen), ext(gen), ext(gen));
        const double v = iou(a, b);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v == iou(b, a));

        const double s = scale(gen);
        const BoundingBox as = box(a.x * s, a.y * s, a.w * s, a.h * s);
        const BoundingBox bs = box(b.x * s, b.y * s, b.w * s, b.h * s);
        CHECK(iou(as, bs) == doctest::Approx(v).epsilon(1e-9));

        const double dx = pos(gen), dy = pos(gen);
        CHECK(iou(box(a.x + dx, a.y + dy, a.w, a.h), box(b.x + dx, b.y + dy, b.w, b.h)) ==
              doctest::Approx(v).epsilon(1e-9));
    }
}

TEST_CASE("filter_predictions: thresholds are inclusive and order is kept") {
    EvalConfig cfg;
    const std::vector<Detection> dets = {
        det(1, 1, box(0, 0, 1, 1), 0.6, 0.45),  // kept
        det(1, 2, box(0, 0, 1, 1), 0.6, 0.35),  // referring score below 0.4
        det(2, 3, box(0, 0, 1, 1), 0.4, 0.9),   // confidence below 0.5
        det(2, 4, box(0, 0, 1, 1), 0.5, 0.4),   // exactly on both thresholds
    };
    const auto kept = filter_predictions(dets, cfg);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0] == dets[0]);
    CHECK(kept[1] == dets[3]);

    cfg.beta_ref = 0.0;
    cfg.score_threshold = 0.0;
    CHECK(filter_predictions(dets, cfg) == dets);
}

TEST_CASE("filter_predictions: monotone in beta_ref and idempotent") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Detection> dets;
    for (int i = 0; i < 500; ++i) dets.push_back(det(1 + i % 7, i, box(0, 0, 1, 1), u(gen), u(gen)));

    EvalConfig lo, hi;
    for (double b = 0.0; b <= 1.0; b += 0.05) {
        lo.beta_ref = b;
        hi.beta_ref = std::min(1.0, b + 0.1);
        const auto out_lo = filter_predictions(dets, lo);
        const auto out_hi = filter_predictions(dets, hi);
        for (const Detection& d : out_hi) CHECK(std::find(out_lo.begin(), out_lo.end(), d) != out_lo.end());
        CHECK(filter_predictions(out_lo, lo) == out_lo);
    }
}

TEST_CASE("EvalConfig defaults and validation") {
    EvalConfig cfg;
    CHECK(cfg.score_threshold == 0.5);
    CHECK(cfg.beta_ref == 0.4);
    REQUIRE(cfg.alpha_grid.size() == 19);
    CHECK(cfg.alpha_grid.front() == 0.05);
    CHECK(cfg.alpha_grid.back() == 0.95);
    CHECK_NOTHROW(cfg.validate());

    EvalConfig bad = cfg;
    bad.alpha_grid = {0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad.alpha_grid = {0.0, 0.5};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.beta_ref = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
}

namespace {

Dataset clean_dataset() {
    Dataset ds;
    Sequence s{"seq", 3, Split::Train, {}};
    s.tracks.push_back({TrackId{1}, {{1, box(0, 0, 5, 5)}, {2, box(1, 0, 5, 5)}}});
    ds.sequences.push_back(s);
    ds.expressions.push_back(rmot::test::task({{1, 1, box(0, 0, 5, 5)}}, "seq", "e1"));
    ds.expressions.push_back(rmot::test::task({}, "seq", "e2"));
    AttributeFrameLabels labels{"seq", std::vector<AttributeSet>(3)};
    for (auto& f : labels.frames) f.set(Attribute::Day);
    ds.attributes.push_back(labels);
    return ds;
}

std::vector<Violation> validate(const Dataset& ds) { return validate_dataset(ds.sequences, ds.expressions, ds.attributes); }

}  // namespace

TEST_CASE("validate_dataset: clean data has no violations") { CHECK(validate(clean_dataset()).empty()); }

TEST_CASE("validate_dataset: day and night on one frame") {
    Dataset ds = clean_dataset();
    ds.attributes[0].frames[1].set(Attribute::Night);
    const auto v = validate(ds);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "ATTR_DAY_NIGHT_CONFLICT");
    CHECK(v[0].sequence_id == "seq");
    CHECK(v[0].frame == Frame{2});
}

TEST_CASE("validate_dataset: negative extent") {
    Dataset ds = clean_dataset();
    ds.sequences[0].tracks[0].boxes[1].w = -3;
    const auto v = validate(ds);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "NEGATIVE_EXTENT");
    CHECK(v[0].track == TrackId{1});
}

TEST_CASE("validate_dataset: collects every violation in one pass") {
    Dataset ds = clean_dataset();
    ds.sequences[0].tracks[0].boxes[9] = box(0, 0, 1, 1);  // beyond length 3
    ds.expressions[1].no_target = false;                    // empty but not flagged
    ds.expressions.push_back(rmot::test::task({}, "nope", "e9"));
    ds.attributes[0].frames.pop_back();
    ds.attributes[0].frames[0].set(Attribute::Night);

    std::vector<std::string> codes;
    for (const auto& v : validate(ds)) codes.push_back(v.code);
    std::sort(codes.begin(), codes.end());
    CHECK(codes == std::vector<std::string>{"ATTR_DAY_NIGHT_CONFLICT", "ATTR_MISSING_FRAMES", "FRAME_OUT_OF_BOUNDS",
                                            "NO_TARGET_INCONSISTENT", "UNKNOWN_SEQUENCE"});
}
