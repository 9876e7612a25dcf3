#include "hypersweep/geo/normalize.hpp"

#include <algorithm>
#include <cmath>

namespace hypersweep::geo {

namespace {

float nearest_rank(std::vector<float>& sorted_scratch, double pct) {
    const auto n = sorted_scratch.size();
    auto rank = static_cast<std::size_t>(std::ceil(pct * static_cast<double>(n) / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted_scratch[rank - 1];
}

}  // namespace

StretchResult percentile_stretch(const Plane& band, double lo_pct, double hi_pct) {
    if (band.data.empty())
        throw GeoError("cannot stretch an empty band");
    if (!(lo_pct >= 0.0 && hi_pct <= 100.0 && lo_pct < hi_pct))
        throw GeoError("percentiles must satisfy 0 <= lo < hi <= 100");

    std::vector<float> sorted = band.data;
    std::sort(sorted.begin(), sorted.end());
    const float lo = nearest_rank(sorted, lo_pct);
    const float hi = nearest_rank(sorted, hi_pct);

    StretchResult result;
    result.plane = Plane(band.width, band.height);
    if (lo == hi) {
        result.degenerate = true;
        return result;
    }
    const float scale = 1.0f / (hi - lo);
    for (std::size_t i = 0; i < band.data.size(); ++i) {
        float v = std::clamp(band.data[i], lo, hi);
        result.plane.data[i] = (v - lo) * scale;
    }
    return result;
}

BandMode parse_band_mode(const std::string& token) {
    if (token == "nir_r_g") return BandMode::NirRG;
    if (token == "ndvi") return BandMode::Ndvi;
    if (token == "evi") return BandMode::Evi;
    throw GeoError("unknown band mode '" + token + "'");
}

std::string band_mode_token(BandMode mode) {
    switch (mode) {
        case BandMode::NirRG: return "nir_r_g";
        case BandMode::Ndvi: return "ndvi";
        case BandMode::Evi: return "evi";
    }
    throw GeoError("unknown band mode");
}

std::vector<Plane> band_combine(const RasterScene& scene, BandMode mode) {
    validate(scene);
    switch (mode) {
        case BandMode::NirRG:
            return {band(scene, "nir"), band(scene, "red"), band(scene, "green")};
        case BandMode::Ndvi: {
            const Plane& nir = band(scene, "nir");
            const Plane& red = band(scene, "red");
            Plane out(scene.width, scene.height);
            for (std::size_t i = 0; i < out.data.size(); ++i) {
                const float denom = nir.data[i] + red.data[i];
                out.data[i] = denom == 0.0f ? 0.0f : (nir.data[i] - red.data[i]) / denom;
            }
            return {std::move(out)};
        }
        case BandMode::Evi: {
            const Plane& nir = band(scene, "nir");
            const Plane& red = band(scene, "red");
            const Plane& blue = band(scene, "blue");
            Plane out(scene.width, scene.height);
            for (std::size_t i = 0; i < out.data.size(); ++i) {
                const float denom =
                    nir.data[i] + 6.0f * red.data[i] - 7.5f * blue.data[i] + 1.0f;
                if (denom == 0.0f) {
                    out.data[i] = 0.0f;
                } else {
                    float v = 2.5f * (nir.data[i] - red.data[i]) / denom;
                    out.data[i] = std::clamp(v, -1.0f, 1.0f);
                }
            }
            return {std::move(out)};
        }
    }
    throw GeoError("unknown band mode");
}

Mask scl_valid_mask(const Plane& scl, int target_width, int target_height,
                    const std::set<int>& cloud_classes) {
    if (scl.width <= 0 || scl.height <= 0)
        throw GeoError("classification plane is empty");
    if (target_width != 2 * scl.width || target_height != 2 * scl.height)
        throw DimensionMismatchError(
            "target dimensions must be exactly twice the classification plane");

    Mask mask(target_width, target_height);
    for (int r = 0; r < target_height; ++r) {
        for (int c = 0; c < target_width; ++c) {
            const int cls = static_cast<int>(std::lround(scl.at(r / 2, c / 2)));
            mask.at(r, c) = cloud_classes.count(cls) ? 0 : 1;
        }
    }
    return mask;
}

}  // namespace hypersweep::geo
