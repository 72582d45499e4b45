#include <doctest.h>

#include <fstream>
#include <sstream>

#include "rmot/error.hpp"
#include "rmot/io.hpp"
#include "rmot/stats.hpp"
#include "support.hpp"

using namespace rmot;
using rmot::test::box;
using rmot::test::task;

TEST_CASE("temporal_ratio") {
    const auto t = task({{1, 1, box(0, 0, 1, 1)}, {2, 1, box(0, 0, 1, 1)}, {2, 2, box(5, 5, 1, 1)}});
    CHECK(temporal_ratio(t, 4) == 0.5);
    CHECK(temporal_ratio(t, 2) == 1.0);
    CHECK(temporal_ratio(task({}), 10) == 0.0);
    CHECK_THROWS_AS(temporal_ratio(t, 0), Error);
}

TEST_CASE("text normalization and tokens") {
    CHECK(normalize_expression_text("  cars \t parked. ") == "cars parked.");
    CHECK(vocabulary_tokens("The white-car, moving!") == std::vector<std::string>{"the", "whitecar", "moving"});
    CHECK(vocabulary_tokens("  ").empty());
}

TEST_CASE("compute_stats: mini fixture hand counts") {
    const auto load = io::load_dataset(rmot::test::fixture_dir());
    const StatsReport r = compute_stats(load.dataset);
    CHECK(r.videos == 3);
    CHECK(r.frames == 19);
    CHECK(r.expressions_total == 6);
    CHECK(r.no_target_expressions == 1);
    CHECK(r.distinct_expressions == 5);
    CHECK(r.expressions_per_sequence == 2.0);
    CHECK(r.instances_total == 7);
    CHECK(r.distinct_instances == 6);
    CHECK(r.instances_per_expression == doctest::Approx(7.0 / 6.0).epsilon(1e-15));
    CHECK(r.bbox_total == 25);
    CHECK(r.word_vocab == 7);
    CHECK(r.temporal_ratio_mean == doctest::Approx(0.55).epsilon(1e-15));

    REQUIRE(r.temporal_ratio_histogram.size() == 20);
    std::vector<std::int64_t> ratio_counts(20, 0);
    ratio_counts[0] = 1;
    ratio_counts[6] = 1;
    ratio_counts[8] = 1;
    ratio_counts[12] = 1;
    ratio_counts[19] = 2;
    for (std::size_t k = 0; k < 20; ++k) CHECK(r.temporal_ratio_histogram[k].count == ratio_counts[k]);

    REQUIRE(r.frames_per_expression_histogram.size() == 8);
    CHECK(r.frames_per_expression_histogram[0].count == 1);
    CHECK(r.frames_per_expression_histogram[1].count == 5);
    for (std::size_t k = 2; k < 8; ++k) CHECK(r.frames_per_expression_histogram[k].count == 0);

    CHECK(compute_stats(load.dataset, 4) == r);
}

TEST_CASE("compute_stats: ratio 0.5 lands in [0.50, 0.55)") {
    Dataset ds;
    ds.sequences.push_back({"s", 4, Split::Train, {}});
    ds.expressions.push_back(task({{1, 1, box(0, 0, 1, 1)}, {2, 1, box(0, 0, 1, 1)}}, "s", "e"));
    const StatsReport r = compute_stats(ds);
    CHECK(r.temporal_ratio_histogram[10].lower == 0.5);
    CHECK(r.temporal_ratio_histogram[10].count == 1);
    CHECK(r.temporal_ratio_histogram[9].count == 0);
}

TEST_CASE("compute_stats: histogram totals equal expression count") {
    const StatsReport r = compute_stats(io::load_dataset(rmot::test::fixture_dir()).dataset);
    std::int64_t a = 0, b = 0;
    for (const auto& bin : r.temporal_ratio_histogram) a += bin.count;
    for (const auto& bin : r.frames_per_expression_histogram) b += bin.count;
    CHECK(a == r.expressions_total);
    CHECK(b == r.expressions_total);
}

TEST_CASE("emit_histograms writes both tables") {
    const StatsReport r = compute_stats(io::load_dataset(rmot::test::fixture_dir()).dataset);
    const auto dir = rmot::test::temp_dir("hist");
    emit_histograms(r, dir);
    std::ifstream in(dir / "frames_per_expression_histogram.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() ==
          "lower,upper,count\n0,0,1\n1,10,5\n11,25,0\n26,50,0\n51,100,0\n101,200,0\n201,400,0\n401,inf,0\n");
    CHECK(std::filesystem::exists(dir / "temporal_ratio_histogram.csv"));
}
