#pragma once
// Radiometric normalization and band arithmetic.

#include <set>
#include <vector>

#include "hypersweep/geo/raster.hpp"

namespace hypersweep::geo {

struct StretchResult {
    Plane plane;             // values in [0, 1]
    bool degenerate = false; // lo and hi percentiles coincided; plane is all zeros
};

// Nearest-rank percentile stretch: with n sorted samples the k-th percentile
// is sorted[ceil(k * n / 100) - 1]. Values are clamped to [lo, hi] and mapped
// linearly onto [0, 1].
StretchResult percentile_stretch(const Plane& band, double lo_pct = 1.0,
                                 double hi_pct = 99.0);

enum class BandMode {
    NirRG,  // stacked false-color composite: nir, red, green
    Ndvi,   // (nir - red) / (nir + red), 0/0 -> 0
    Evi,    // 2.5 (nir - red) / (nir + 6 red - 7.5 blue + 1), clamped to [-1, 1]
};

BandMode parse_band_mode(const std::string& token);  // "nir_r_g" | "ndvi" | "evi"
std::string band_mode_token(BandMode mode);

// Derives the requested composite from scene bands named nir/red/green/blue.
// Throws MissingBandError when a needed band is absent.
std::vector<Plane> band_combine(const RasterScene& scene, BandMode mode);

inline const std::set<int> kDefaultCloudClasses{3, 8, 9, 10};

// Upsamples a scene-classification plane (half resolution, nearest neighbor)
// to target dimensions and marks pixels whose class is not a cloud class.
// Requires target dimensions to be exactly twice the classification plane's.
Mask scl_valid_mask(const Plane& scl, int target_width, int target_height,
                    const std::set<int>& cloud_classes = kDefaultCloudClasses);

}  // namespace hypersweep::geo
