#pragma once
// Sliding-window chip extraction, class-balance filters and rotations.

#include <vector>

#include "hypersweep/geo/raster.hpp"

namespace hypersweep::geo {

struct NonSquareChipError : GeoError {
    using GeoError::GeoError;
};

struct ChipWindow {
    int row0 = 0;
    int col0 = 0;
    int size = 0;

    bool operator==(const ChipWindow&) const = default;
};

// Windows in row-major order with stride round(chip_size * (1 - overlap)),
// floored at one pixel. Windows never extend past the raster edge; a raster
// smaller than the chip yields none.
std::vector<ChipWindow> gen_windows(int width, int height, int chip_size,
                                    double overlap_frac);

Plane crop(const Plane& src, const ChipWindow& w);
Mask crop(const Mask& src, const ChipWindow& w);

// Keeps windows whose foreground share lies in [min_frac, 1 - min_frac],
// i.e. both classes cover at least min_frac of the window.
std::vector<ChipWindow> filter_binary_chips(const std::vector<ChipWindow>& windows,
                                            const Mask& labels,
                                            double min_frac = 0.10);

// Keeps windows where the changed share (pixels differing between the two
// epochs) is at least min_change_frac.
std::vector<ChipWindow> filter_change_chips(const std::vector<ChipWindow>& windows,
                                            const Mask& before, const Mask& after,
                                            double min_change_frac = 0.10);

// Clockwise quarter-turn rotations; square inputs only.
Plane rotate90(const Plane& chip);
Plane rotate180(const Plane& chip);
Mask rotate90(const Mask& chip);
Mask rotate180(const Mask& chip);

// For each input chip emits the original followed by its rotations, in the
// order the angles are given. Angles are restricted to 90, 180 and 270.
std::vector<Plane> rotate_augment(const std::vector<Plane>& chips,
                                  const std::vector<int>& angles = {90, 180});
std::vector<Mask> rotate_augment(const std::vector<Mask>& chips,
                                 const std::vector<int>& angles = {90, 180});

}  // namespace hypersweep::geo
