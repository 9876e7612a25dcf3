#include "hypersweep/geo/chipping.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "testutil.hpp"

using namespace hypersweep::geo;

namespace {

// Construct every valid window position the slow way.
std::vector<ChipWindow> brute_force_windows(int width, int height, int chip,
                                            double overlap) {
    std::vector<ChipWindow> out;
    if (chip > width || chip > height) return out;
    int stride = static_cast<int>(std::lround(chip * (1.0 - overlap)));
    if (stride < 1) stride = 1;
    for (int row0 = 0; row0 + chip <= height; row0 += stride)
        for (int col0 = 0; col0 + chip <= width; col0 += stride)
            out.push_back({row0, col0, chip});
    return out;
}

Mask checker(int width, int height, int block) {
    Mask m(width, height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            m.at(r, c) = static_cast<std::uint8_t>(((r / block) + (c / block)) % 2);
    return m;
}

}  // namespace

TEST_CASE("window generation matches brute force on random configurations") {
    std::mt19937_64 rng(555);
    for (int round = 0; round < 200; ++round) {
        const int width = testutil::uniform_int(rng, 1, 3000);
        const int height = testutil::uniform_int(rng, 1, 3000);
        const int chip = testutil::uniform_int(rng, 1, 512);
        const double overlap = testutil::u01(rng) * 0.95;
        CAPTURE(width);
        CAPTURE(height);
        CAPTURE(chip);
        CAPTURE(overlap);
        REQUIRE(gen_windows(width, height, chip, overlap) ==
                brute_force_windows(width, height, chip, overlap));
    }
}

TEST_CASE("the campaign-scale window grid has the expected size") {
    const auto windows = gen_windows(10000, 10000, 256, 0.25);
    // stride 192, 51 positions per axis
    CHECK(windows.size() == 2601);
    CHECK(windows.front() == ChipWindow{0, 0, 256});
    CHECK(windows.back() == ChipWindow{50 * 192, 50 * 192, 256});
}

TEST_CASE("window generation handles edge geometries") {
    CHECK(gen_windows(100, 100, 256, 0.25).empty());  // chip larger than raster
    CHECK(gen_windows(256, 100, 256, 0.25).empty());  // larger than one axis

    const auto exact = gen_windows(256, 256, 256, 0.25);
    REQUIRE(exact.size() == 1);
    CHECK(exact[0] == ChipWindow{0, 0, 256});

    // overlap so high the stride floors at one pixel
    const auto dense = gen_windows(5, 5, 4, 0.9);
    CHECK(dense.size() == 4);  // row0, col0 in {0, 1}

    CHECK_THROWS_AS(gen_windows(0, 100, 16, 0.0), GeoError);
    CHECK_THROWS_AS(gen_windows(100, 100, 0, 0.0), GeoError);
    CHECK_THROWS_AS(gen_windows(100, 100, 16, 1.0), GeoError);
    CHECK_THROWS_AS(gen_windows(100, 100, 16, -0.1), GeoError);
}

TEST_CASE("windows tile in row-major order without leaving the raster") {
    const auto windows = gen_windows(1000, 700, 128, 0.5);
    REQUIRE_FALSE(windows.empty());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        CHECK(windows[i].row0 + windows[i].size <= 700);
        CHECK(windows[i].col0 + windows[i].size <= 1000);
        if (i > 0) {
            const bool later_row = windows[i].row0 > windows[i - 1].row0;
            const bool same_row_later_col = windows[i].row0 == windows[i - 1].row0 &&
                                            windows[i].col0 > windows[i - 1].col0;
            CHECK((later_row || same_row_later_col));
        }
    }
}

TEST_CASE("crop copies the window and checks bounds") {
    Plane plane(10, 8);
    for (std::size_t i = 0; i < plane.size(); ++i)
        plane.data[i] = static_cast<float>(i);
    const ChipWindow w{2, 3, 4};
    const Plane chip = crop(plane, w);
    REQUIRE(chip.width == 4);
    REQUIRE(chip.height == 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            CHECK(chip.at(r, c) == plane.at(r + 2, c + 3));

    CHECK_THROWS_AS(crop(plane, ChipWindow{6, 0, 4}), GeoError);   // bottom edge
    CHECK_THROWS_AS(crop(plane, ChipWindow{0, 8, 4}), GeoError);   // right edge
    CHECK_THROWS_AS(crop(plane, ChipWindow{-1, 0, 4}), GeoError);

    Mask mask(10, 8, 1);
    const Mask mchip = crop(mask, w);
    CHECK(mchip.width == 4);
    CHECK(mchip.data == std::vector<std::uint8_t>(16, 1));
}

TEST_CASE("binary filter keeps only mixed chips, inclusively at the bounds") {
    // 10x10 window over a mask whose left k columns are foreground
    auto share_window = [](int k) {
        Mask labels(10, 10);
        for (int r = 0; r < 10; ++r)
            for (int c = 0; c < k; ++c) labels.at(r, c) = 1;
        return filter_binary_chips({{0, 0, 10}}, labels, 0.10).size();
    };
    CHECK(share_window(0) == 0);    // all background
    CHECK(share_window(1) == 1);    // exactly 10% foreground: inclusive
    CHECK(share_window(5) == 1);
    CHECK(share_window(9) == 1);    // exactly 10% background: inclusive
    CHECK(share_window(10) == 0);   // all foreground

    CHECK_THROWS_AS(filter_binary_chips({{0, 0, 10}}, checker(4, 4, 2), 0.10),
                    GeoError);  // window outside the mask
    CHECK_THROWS_AS(filter_binary_chips({}, checker(4, 4, 2), 0.6), GeoError);
    CHECK_THROWS_AS(filter_binary_chips({}, checker(4, 4, 2), -0.1), GeoError);
}

TEST_CASE("binary filter output is a subset and shrinks as the bar rises") {
    std::mt19937_64 rng(777);
    for (int round = 0; round < 50; ++round) {
        const int width = testutil::uniform_int(rng, 16, 120);
        const int height = testutil::uniform_int(rng, 16, 120);
        Mask labels(width, height);
        for (auto& v : labels.data)
            v = static_cast<std::uint8_t>(testutil::u01(rng) < 0.3);
        const auto windows =
            gen_windows(width, height, testutil::uniform_int(rng, 4, 16),
                        0.25 * testutil::u01(rng));

        std::size_t prev = windows.size();
        for (double bar : {0.0, 0.1, 0.2, 0.35, 0.5}) {
            const auto kept = filter_binary_chips(windows, labels, bar);
            CHECK(kept.size() <= prev);
            prev = kept.size();
            std::size_t cursor = 0;  // subset check, order preserved
            for (const auto& w : kept) {
                while (cursor < windows.size() && !(windows[cursor] == w)) ++cursor;
                REQUIRE(cursor < windows.size());
                ++cursor;
            }
        }
    }
}

TEST_CASE("change filter keeps windows with enough flipped pixels") {
    Mask before(10, 10);
    Mask after(10, 10);
    for (int r = 0; r < 10; ++r)
        for (int c = 0; c < 3; ++c) after.at(r, c) = 1;  // 30% changed

    const std::vector<ChipWindow> windows = {{0, 0, 10}};
    CHECK(filter_change_chips(windows, before, after, 0.3).size() == 1);
    CHECK(filter_change_chips(windows, before, after, 0.31).empty());
    CHECK(filter_change_chips(windows, before, before, 0.01).empty());

    Mask small(4, 4);
    CHECK_THROWS_AS(filter_change_chips(windows, before, small, 0.1),
                    DimensionMismatchError);
}

TEST_CASE("rotations compose the way quarter turns should") {
    Plane chip(6, 6);
    std::mt19937_64 rng(31);
    for (auto& v : chip.data) v = static_cast<float>(testutil::u01(rng));

    const Plane r90 = rotate90(chip);
    CHECK(r90.at(0, 5) == chip.at(0, 0));  // top-left corner moves to top-right
    CHECK(rotate90(rotate90(chip)).data == rotate180(chip).data);
    CHECK(rotate90(rotate90(rotate90(rotate90(chip)))).data == chip.data);
    CHECK(rotate180(rotate180(chip)).data == chip.data);

    Mask mask(4, 4);
    mask.at(0, 0) = 1;
    const Mask m90 = rotate90(mask);
    CHECK(m90.at(0, 3) == 1);
    CHECK(rotate90(rotate90(mask)) == rotate180(mask));

    Plane tall(4, 6);
    CHECK_THROWS_AS(rotate90(tall), NonSquareChipError);
    CHECK_THROWS_AS(rotate180(tall), NonSquareChipError);
}

TEST_CASE("augmentation triples the set with the default angles") {
    std::vector<Mask> chips;
    for (int i = 0; i < 2578; ++i) {
        Mask m(3, 3);
        m.at(i % 3, (i / 3) % 3) = 1;
        chips.push_back(std::move(m));
    }
    const auto augmented = rotate_augment(chips);
    REQUIRE(augmented.size() == 7734);  // 3x: original, 90, 180
    CHECK(augmented[0] == chips[0]);
    CHECK(augmented[1] == rotate90(chips[0]));
    CHECK(augmented[2] == rotate180(chips[0]));
    CHECK(augmented[3] == chips[1]);

    const auto quads = rotate_augment(chips, {90, 180, 270});
    CHECK(quads.size() == chips.size() * 4);
    CHECK(quads[3] == rotate90(rotate180(chips[0])));  // 270 = 90 after 180

    CHECK(rotate_augment(std::vector<Mask>{}, {90}).empty());
    CHECK_THROWS_AS(rotate_augment(chips, {45}), GeoError);
}
