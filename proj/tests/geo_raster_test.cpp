#include "hypersweep/geo/raster.hpp"

#include <doctest.h>

#include <random>

#include "testutil.hpp"

using namespace hypersweep::geo;

namespace {

RasterScene small_scene(const std::string& id, float seed_value) {
    RasterScene scene;
    scene.id = id;
    scene.width = 8;
    scene.height = 6;
    scene.crs = "EPSG:32611";
    scene.date = {2021, 8, 14};
    scene.geotransform = {500000.0, 5800000.0, 10.0};
    for (const char* name : {"nir", "red"}) {
        Plane plane(8, 6);
        plane.quant = 10.0;
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 8; ++c)
                plane.at(r, c) = seed_value + r * 8.0f + c + (name[0] == 'r' ? 0.3f : 0.0f);
        scene.bands[name] = std::move(plane);
    }
    return scene;
}

}  // namespace

TEST_CASE("dates parse, print and refuse garbage") {
    const Date d = parse_date("2021-08-04");
    CHECK(d.year == 2021);
    CHECK(d.month == 8);
    CHECK(d.day == 4);
    CHECK(date_token(d) == "2021-08-04");
    CHECK(parse_date(date_token(d)) == d);

    CHECK_THROWS_AS(parse_date("2021-8-04"), GeoError);
    CHECK_THROWS_AS(parse_date("2021/08/04"), GeoError);
    CHECK_THROWS_AS(parse_date("2021-13-01"), GeoError);
    CHECK_THROWS_AS(parse_date("2021-02-30"), GeoError);
    CHECK_THROWS_AS(parse_date("garbage"), GeoError);
    CHECK_THROWS_AS(parse_date("2021-08-041"), GeoError);
}

TEST_CASE("calendar arithmetic crosses months, years and leap days") {
    CHECK(add_days({2020, 2, 28}, 1) == Date{2020, 2, 29});
    CHECK(add_days({2021, 2, 28}, 1) == Date{2021, 3, 1});
    CHECK(add_days({2020, 12, 31}, 1) == Date{2021, 1, 1});
    CHECK(add_days({2021, 1, 15}, -20) == Date{2020, 12, 26});
    CHECK(add_days({2021, 8, 14}, 0) == Date{2021, 8, 14});
}

TEST_CASE("date ranges pad both endpoints") {
    const DateRange r = date_range(parse_date("2020-07-01"), parse_date("2020-08-15"));
    CHECK(date_token(r.start) == "2020-06-01");
    CHECK(date_token(r.end) == "2020-09-14");

    const DateRange same = date_range(parse_date("2021-08-01"), parse_date("2021-08-01"));
    CHECK(date_token(same.start) == "2021-07-02");
    CHECK(date_token(same.end) == "2021-08-31");

    const DateRange tight = date_range(parse_date("2021-08-01"), parse_date("2021-08-02"), 0);
    CHECK(tight.start == Date{2021, 8, 1});
    CHECK(tight.end == Date{2021, 8, 2});

    CHECK_THROWS_AS(date_range(parse_date("2021-08-02"), parse_date("2021-08-01")),
                    InvertedDatesError);
    CHECK_THROWS_AS(date_range(parse_date("2021-08-01"), parse_date("2021-08-02"), -1),
                    GeoError);
}

TEST_CASE("geotransform maps pixel centers") {
    const GeoTransform gt{100.0, 200.0, 10.0};
    // row 0, col 0 center sits half a pixel in from the top-left corner
    CHECK(gt.origin_x + 0.5 * gt.pixel_size == doctest::Approx(105.0));
    CHECK(gt.origin_y - 0.5 * gt.pixel_size == doctest::Approx(195.0));
}

TEST_CASE("scene validation spots dimension drift and missing bands") {
    RasterScene scene = small_scene("t11-2021-08-14", 100.0f);
    CHECK_NOTHROW(validate(scene));
    CHECK(band(scene, "nir").at(0, 0) == doctest::Approx(100.0f));
    CHECK_THROWS_AS(band(scene, "swir"), MissingBandError);

    scene.bands["red"].width = 4;
    CHECK_THROWS_AS(validate(scene), DimensionMismatchError);
}

TEST_CASE("scene containers round-trip through disk") {
    testutil::ScratchDir scratch("scene-io");
    const RasterScene scene = small_scene("t11-2021-08-14", 100.0f);
    write_scene(scratch.path, scene);

    const RasterScene back = read_scene(scratch.path);
    CHECK(back.id == scene.id);
    CHECK(back.width == scene.width);
    CHECK(back.height == scene.height);
    CHECK(back.crs == scene.crs);
    CHECK(back.date == scene.date);
    CHECK(back.geotransform.origin_x == scene.geotransform.origin_x);
    CHECK(back.geotransform.pixel_size == scene.geotransform.pixel_size);
    REQUIRE(back.bands.size() == 2);

    // quant = 10 stores one decimal exactly
    for (const auto& [name, plane] : scene.bands) {
        const Plane& restored = band(back, name);
        REQUIRE(restored.size() == plane.size());
        for (std::size_t i = 0; i < plane.size(); ++i) {
            CHECK(restored.data[i] == doctest::Approx(plane.data[i]).epsilon(1e-6));
        }
    }
}

TEST_CASE("reading a mangled container fails loudly") {
    testutil::ScratchDir scratch("scene-bad");
    write_scene(scratch.path, small_scene("s", 10.0f));

    std::filesystem::resize_file(scratch.path / "nir.u16", 7);  // truncate mid-pixel
    CHECK_THROWS_AS(read_scene(scratch.path), GeoError);

    testutil::ScratchDir empty("scene-empty");
    CHECK_THROWS_AS(read_scene(empty.path), std::runtime_error);
}

TEST_CASE("masks round-trip alongside the scene bands") {
    testutil::ScratchDir scratch("mask-io");
    write_scene(scratch.path, small_scene("s", 10.0f));

    Mask mask(8, 6);
    mask.at(2, 3) = 1;
    mask.at(5, 7) = 1;
    write_mask(scratch.path, mask, "labels");
    CHECK(read_mask(scratch.path, "labels") == mask);
    CHECK_THROWS_AS(read_mask(scratch.path, "clouds"), std::runtime_error);
}

TEST_CASE("content hash tracks pixels, not ids") {
    const RasterScene a = small_scene("alpha", 100.0f);
    RasterScene b = small_scene("beta", 100.0f);
    CHECK(scene_content_hash(a) == scene_content_hash(b));  // same pixels, new id

    b.bands["nir"].at(0, 0) += 1.0f;
    CHECK(scene_content_hash(a) != scene_content_hash(b));

    // a change below the quantization step is invisible to the stored bytes
    RasterScene c = small_scene("gamma", 100.0f);
    c.bands["nir"].at(0, 0) += 0.001f;
    CHECK(scene_content_hash(a) == scene_content_hash(c));
}

TEST_CASE("dedupe removes repeated ids and repeated pixels") {
    std::vector<RasterScene> scenes;
    scenes.push_back(small_scene("a", 1.0f));
    scenes.push_back(small_scene("a", 2.0f));  // same id, different pixels
    scenes.push_back(small_scene("b", 1.0f));  // different id, same pixels as first
    scenes.push_back(small_scene("c", 3.0f));

    const auto kept = dedupe(std::move(scenes));
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].id == "a");
    CHECK(kept[0].bands.at("nir").at(0, 0) == doctest::Approx(1.0f));
    CHECK(kept[1].id == "c");
}
