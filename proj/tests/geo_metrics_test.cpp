#include "hypersweep/geo/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>

#include "testutil.hpp"

using namespace hypersweep::geo;

namespace {

// Confusion counts that hit a precision/recall pair exactly: with P and R
// given as parts per ten thousand, tp = P*R, fp = (10000-P)*R, fn = (10000-R)*P.
SegMetrics metrics_for(std::uint64_t p4, std::uint64_t r4) {
    const std::uint64_t tp = p4 * r4;
    const std::uint64_t fp = (10000 - p4) * r4;
    const std::uint64_t fn = (10000 - r4) * p4;
    return seg_metrics_from_counts(tp, fp, fn, 0);
}

}  // namespace

TEST_CASE("published segmentation scores follow from precision and recall") {
    struct Row {
        std::uint64_t p4, r4;       // precision/recall, parts per 10k
        double f1_stated, iou_stated;
    };
    // the four encoder benchmarks: stated F1/IoU reproduce to within 1e-3
    const Row rows[] = {
        {8303, 8088, 0.820, 0.694},
        {8278, 8197, 0.824, 0.700},
        {8371, 8378, 0.837, 0.720},
        {8435, 8229, 0.833, 0.714},
    };
    for (const Row& row : rows) {
        CAPTURE(row.p4);
        const SegMetrics m = metrics_for(row.p4, row.r4);
        REQUIRE(m.precision.has_value());
        REQUIRE(m.recall.has_value());
        REQUIRE(m.f1.has_value());
        REQUIRE(m.iou.has_value());
        CHECK(*m.precision == doctest::Approx(row.p4 / 10000.0).epsilon(1e-12));
        CHECK(*m.recall == doctest::Approx(row.r4 / 10000.0).epsilon(1e-12));
        CHECK(std::abs(*m.f1 - row.f1_stated) < 1e-3);
        CHECK(std::abs(*m.iou - row.iou_stated) < 1e-3);
        // the two scores are locked together
        CHECK(*m.iou == doctest::Approx(*m.f1 / (2.0 - *m.f1)).epsilon(1e-12));
    }
}

TEST_CASE("f1 and iou satisfy their identity on random confusion counts") {
    std::mt19937_64 rng(13);
    int checked = 0;
    while (checked < 1000) {
        const auto tp = static_cast<std::uint64_t>(testutil::uniform_int(rng, 0, 100000));
        const auto fp = static_cast<std::uint64_t>(testutil::uniform_int(rng, 0, 100000));
        const auto fn = static_cast<std::uint64_t>(testutil::uniform_int(rng, 0, 100000));
        const auto tn = static_cast<std::uint64_t>(testutil::uniform_int(rng, 0, 100000));
        if (tp + fp + fn == 0) continue;
        const SegMetrics m = seg_metrics_from_counts(tp, fp, fn, tn);
        REQUIRE(m.f1.has_value());
        REQUIRE(m.iou.has_value());
        REQUIRE(*m.iou == doctest::Approx(*m.f1 / (2.0 - *m.f1)).epsilon(1e-12));
        REQUIRE(*m.f1 >= 0.0);
        REQUIRE(*m.f1 <= 1.0);
        ++checked;
    }
}

TEST_CASE("ratios go absent exactly when their denominators vanish") {
    const SegMetrics all_tn = seg_metrics_from_counts(0, 0, 0, 50);
    CHECK_FALSE(all_tn.precision.has_value());
    CHECK_FALSE(all_tn.recall.has_value());
    CHECK_FALSE(all_tn.f1.has_value());
    CHECK_FALSE(all_tn.iou.has_value());

    const SegMetrics no_preds = seg_metrics_from_counts(0, 0, 10, 50);
    CHECK_FALSE(no_preds.precision.has_value());  // never predicted positive
    REQUIRE(no_preds.recall.has_value());
    CHECK(*no_preds.recall == 0.0);
    REQUIRE(no_preds.f1.has_value());
    CHECK(*no_preds.f1 == 0.0);
    CHECK(*no_preds.iou == 0.0);

    const SegMetrics no_truth = seg_metrics_from_counts(0, 10, 0, 50);
    REQUIRE(no_truth.precision.has_value());
    CHECK(*no_truth.precision == 0.0);
    CHECK_FALSE(no_truth.recall.has_value());  // nothing to recall
    REQUIRE(no_truth.f1.has_value());
    CHECK(*no_truth.f1 == 0.0);

    const SegMetrics perfect = seg_metrics_from_counts(25, 0, 0, 75);
    CHECK(*perfect.precision == 1.0);
    CHECK(*perfect.recall == 1.0);
    CHECK(*perfect.f1 == 1.0);
    CHECK(*perfect.iou == 1.0);
}

TEST_CASE("mask comparison counts each confusion cell") {
    Mask pred(4, 2);
    Mask truth(4, 2);
    // row 0: pred 1100, truth 1010 -> tp,fp,fn,tn one each
    pred.at(0, 0) = 1;
    pred.at(0, 1) = 1;
    truth.at(0, 0) = 1;
    truth.at(0, 2) = 1;
    // row 1: agreement everywhere, one joint positive (value 7 counts too)
    pred.at(1, 3) = 7;
    truth.at(1, 3) = 2;

    const SegMetrics m = seg_metrics(pred, truth);
    CHECK(m.tp == 2);
    CHECK(m.fp == 1);
    CHECK(m.fn == 1);
    CHECK(m.tn == 4);
    CHECK(*m.precision == doctest::Approx(2.0 / 3.0));
    CHECK(*m.recall == doctest::Approx(2.0 / 3.0));
    CHECK(*m.f1 == doctest::Approx(2.0 / 3.0));
    CHECK(*m.iou == doctest::Approx(0.5));

    Mask wider(5, 2);
    CHECK_THROWS_AS(seg_metrics(pred, wider), DimensionMismatchError);
}
