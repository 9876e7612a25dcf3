#include "hypersweep/geo/chipping.hpp"

#include <algorithm>
#include <cmath>

namespace hypersweep::geo {

std::vector<ChipWindow> gen_windows(int width, int height, int chip_size,
                                    double overlap_frac) {
    if (width <= 0 || height <= 0)
        throw GeoError("raster dimensions must be positive");
    if (chip_size <= 0)
        throw GeoError("chip size must be positive");
    if (!(overlap_frac >= 0.0 && overlap_frac < 1.0))
        throw GeoError("overlap fraction must lie in [0, 1)");

    std::vector<ChipWindow> windows;
    if (chip_size > width || chip_size > height)
        return windows;

    const int stride = std::max(
        1, static_cast<int>(std::lround(chip_size * (1.0 - overlap_frac))));
    for (int row0 = 0; row0 + chip_size <= height; row0 += stride)
        for (int col0 = 0; col0 + chip_size <= width; col0 += stride)
            windows.push_back(ChipWindow{row0, col0, chip_size});
    return windows;
}

namespace {

void check_window(int width, int height, const ChipWindow& w) {
    if (w.size <= 0 || w.row0 < 0 || w.col0 < 0 || w.row0 + w.size > height ||
        w.col0 + w.size > width)
        throw GeoError("chip window falls outside the raster");
}

}  // namespace

Plane crop(const Plane& src, const ChipWindow& w) {
    check_window(src.width, src.height, w);
    Plane out(w.size, w.size);
    out.quant = src.quant;
    for (int r = 0; r < w.size; ++r)
        for (int c = 0; c < w.size; ++c)
            out.at(r, c) = src.at(w.row0 + r, w.col0 + c);
    return out;
}

Mask crop(const Mask& src, const ChipWindow& w) {
    check_window(src.width, src.height, w);
    Mask out(w.size, w.size);
    for (int r = 0; r < w.size; ++r)
        for (int c = 0; c < w.size; ++c)
            out.at(r, c) = src.at(w.row0 + r, w.col0 + c);
    return out;
}

std::vector<ChipWindow> filter_binary_chips(const std::vector<ChipWindow>& windows,
                                            const Mask& labels, double min_frac) {
    if (!(min_frac >= 0.0 && min_frac <= 0.5))
        throw GeoError("class fraction threshold must lie in [0, 0.5]");
    std::vector<ChipWindow> kept;
    for (const auto& w : windows) {
        check_window(labels.width, labels.height, w);
        std::size_t fg = 0;
        for (int r = 0; r < w.size; ++r)
            for (int c = 0; c < w.size; ++c)
                fg += labels.at(w.row0 + r, w.col0 + c) != 0;
        const double total = static_cast<double>(w.size) * w.size;
        const double share = static_cast<double>(fg) / total;
        if (share >= min_frac && share <= 1.0 - min_frac)
            kept.push_back(w);
    }
    return kept;
}

std::vector<ChipWindow> filter_change_chips(const std::vector<ChipWindow>& windows,
                                            const Mask& before, const Mask& after,
                                            double min_change_frac) {
    if (before.width != after.width || before.height != after.height)
        throw DimensionMismatchError("change filter epochs differ in size");
    if (!(min_change_frac >= 0.0 && min_change_frac <= 1.0))
        throw GeoError("change fraction threshold must lie in [0, 1]");
    std::vector<ChipWindow> kept;
    for (const auto& w : windows) {
        check_window(before.width, before.height, w);
        std::size_t changed = 0;
        for (int r = 0; r < w.size; ++r)
            for (int c = 0; c < w.size; ++c)
                changed += (before.at(w.row0 + r, w.col0 + c) != 0) !=
                           (after.at(w.row0 + r, w.col0 + c) != 0);
        const double total = static_cast<double>(w.size) * w.size;
        if (static_cast<double>(changed) / total >= min_change_frac)
            kept.push_back(w);
    }
    return kept;
}

namespace {

template <typename Image>
void require_square(const Image& chip) {
    if (chip.width != chip.height)
        throw NonSquareChipError("rotation requires square chips");
}

}  // namespace

Plane rotate90(const Plane& chip) {
    require_square(chip);
    const int n = chip.width;
    Plane out(n, n);
    out.quant = chip.quant;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            out.at(r, c) = chip.at(n - 1 - c, r);
    return out;
}

Plane rotate180(const Plane& chip) {
    require_square(chip);
    const int n = chip.width;
    Plane out(n, n);
    out.quant = chip.quant;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            out.at(r, c) = chip.at(n - 1 - r, n - 1 - c);
    return out;
}

Mask rotate90(const Mask& chip) {
    require_square(chip);
    const int n = chip.width;
    Mask out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            out.at(r, c) = chip.at(n - 1 - c, r);
    return out;
}

Mask rotate180(const Mask& chip) {
    require_square(chip);
    const int n = chip.width;
    Mask out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            out.at(r, c) = chip.at(n - 1 - r, n - 1 - c);
    return out;
}

namespace {

template <typename Image>
Image rotate_by(const Image& chip, int angle) {
    switch (angle) {
        case 90: return rotate90(chip);
        case 180: return rotate180(chip);
        case 270: return rotate90(rotate180(chip));
    }
    throw GeoError("rotation angle must be 90, 180 or 270");
}

template <typename Image>
std::vector<Image> augment(const std::vector<Image>& chips,
                           const std::vector<int>& angles) {
    for (int angle : angles)
        if (angle != 90 && angle != 180 && angle != 270)
            throw GeoError("rotation angle must be 90, 180 or 270");
    std::vector<Image> out;
    out.reserve(chips.size() * (1 + angles.size()));
    for (const auto& chip : chips) {
        require_square(chip);
        out.push_back(chip);
        for (int angle : angles)
            out.push_back(rotate_by(chip, angle));
    }
    return out;
}

}  // namespace

std::vector<Plane> rotate_augment(const std::vector<Plane>& chips,
                                  const std::vector<int>& angles) {
    return augment(chips, angles);
}

std::vector<Mask> rotate_augment(const std::vector<Mask>& chips,
                                 const std::vector<int>& angles) {
    return augment(chips, angles);
}

}  // namespace hypersweep::geo
