#include "hypersweep/geo/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hypersweep/digest.hpp"

namespace hypersweep::geo {

namespace {

// Raw 53-bit draws keep the stream identical across standard libraries.
double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Wave {
    double fx, fy, phase, amp;
};

std::vector<Wave> make_waves(std::mt19937_64& rng, int count) {
    std::vector<Wave> waves;
    waves.reserve(count);
    for (int i = 0; i < count; ++i) {
        Wave w;
        w.fx = 1.0 + 5.0 * u01(rng);
        w.fy = 1.0 + 5.0 * u01(rng);
        w.phase = 2.0 * std::numbers::pi * u01(rng);
        w.amp = 0.5 + 0.5 * u01(rng);
        waves.push_back(w);
    }
    return waves;
}

Plane smooth_field(const std::vector<Wave>& waves, int width, int height) {
    Plane field(width, height);
    double norm = 0.0;
    for (const auto& w : waves)
        norm += w.amp;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            double v = 0.0;
            for (const auto& w : waves)
                v += w.amp * std::sin(2.0 * std::numbers::pi *
                                          (w.fx * c / width + w.fy * r / height) +
                                      w.phase);
            field.at(r, c) = static_cast<float>(v / norm);  // roughly [-1, 1]
        }
    }
    return field;
}

Polygon star_polygon(std::mt19937_64& rng, const GeoTransform& gt, int width,
                     int height) {
    const double extent_x = width * gt.pixel_size;
    const double extent_y = height * gt.pixel_size;
    const double cx = gt.origin_x + extent_x * (0.2 + 0.6 * u01(rng));
    const double cy = gt.origin_y - extent_y * (0.2 + 0.6 * u01(rng));
    const double base_r =
        std::min(extent_x, extent_y) * (0.05 + 0.07 * u01(rng));
    const int vertices = 8 + static_cast<int>(u01(rng) * 8.0);

    Polygon poly;
    for (int j = 0; j < vertices; ++j) {
        // Jitter below the angular spacing keeps angles strictly increasing,
        // so the ring is star-shaped and cannot self-intersect.
        const double theta =
            2.0 * std::numbers::pi * (j + 0.3 * u01(rng)) / vertices;
        const double r = base_r * (0.6 + 0.7 * u01(rng));
        poly.exterior.push_back(
            Point{cx + r * std::cos(theta), cy + r * std::sin(theta)});
    }
    poly.exterior.push_back(poly.exterior.front());
    validate(poly);
    return poly;
}

Plane band_from_field(const Plane& field, float base, float swing) {
    Plane out(field.width, field.height);
    for (std::size_t i = 0; i < field.data.size(); ++i)
        out.data[i] = std::max(0.0f, base + swing * field.data[i]);
    return out;
}

}  // namespace

SyntheticScene synth_scene(const std::string& id, const SyntheticParams& params) {
    if (params.width <= 0 || params.height <= 0)
        throw GeoError("synthetic scene dimensions must be positive");
    if (params.polygon_count < 0)
        throw GeoError("polygon count must be non-negative");
    if (params.pixel_size <= 0.0)
        throw GeoError("pixel size must be positive");

    std::mt19937_64 rng(params.seed * 0x9e3779b97f4a7c15ULL ^ fnv1a64(id));

    SyntheticScene out;
    out.scene.id = id;
    out.scene.width = params.width;
    out.scene.height = params.height;
    out.scene.crs = "EPSG:32611";
    out.scene.geotransform = GeoTransform{500000.0, 5800000.0, params.pixel_size};
    out.scene.date = add_days(Date{2021, 8, 1},
                              static_cast<int>(fnv1a64(id) % 60));

    const Plane field = smooth_field(make_waves(rng, 4), params.width, params.height);
    Plane nir = band_from_field(field, 6000.0f, 1500.0f);
    Plane red = band_from_field(field, 900.0f, -250.0f);
    Plane green = band_from_field(field, 1600.0f, 400.0f);
    Plane blue = band_from_field(field, 700.0f, 150.0f);

    for (int i = 0; i < params.polygon_count; ++i)
        out.truth.push_back(
            star_polygon(rng, out.scene.geotransform, params.width, params.height));

    const Mask burned = rasterize(out.truth, out.scene.geotransform, params.width,
                                  params.height);
    for (std::size_t i = 0; i < burned.data.size(); ++i) {
        if (!burned.data[i])
            continue;
        nir.data[i] *= 0.45f;
        red.data[i] *= 1.8f;
        green.data[i] *= 0.8f;
    }

    out.scene.bands.emplace("nir", std::move(nir));
    out.scene.bands.emplace("red", std::move(red));
    out.scene.bands.emplace("green", std::move(green));
    out.scene.bands.emplace("blue", std::move(blue));
    validate(out.scene);
    return out;
}

SyntheticArchive::SyntheticArchive(SyntheticParams params, int polls_until_online)
    : params_(params), polls_until_online_(polls_until_online) {
    if (polls_until_online < 0)
        throw GeoError("polls_until_online must be non-negative");
}

void SyntheticArchive::request(const std::string& scene_id) {
    polls_.try_emplace(scene_id, 0);  // re-requesting does not reset progress
}

bool SyntheticArchive::online(const std::string& scene_id) {
    auto it = polls_.find(scene_id);
    if (it == polls_.end())
        throw ArchiveProtocolError("scene '" + scene_id + "' was never requested");
    ++it->second;
    return it->second >= polls_until_online_;
}

SyntheticScene SyntheticArchive::fetch(const std::string& scene_id) {
    auto it = polls_.find(scene_id);
    if (it == polls_.end())
        throw ArchiveProtocolError("scene '" + scene_id + "' was never requested");
    if (it->second < polls_until_online_)
        throw ArchiveProtocolError("scene '" + scene_id + "' is still offline");
    SyntheticParams params = params_;
    if (auto ov = polygon_overrides_.find(scene_id); ov != polygon_overrides_.end())
        params.polygon_count = ov->second;
    return synth_scene(scene_id, params);
}

void SyntheticArchive::set_polygon_count(const std::string& scene_id, int count) {
    if (count < 0)
        throw GeoError("polygon count must be non-negative");
    polygon_overrides_[scene_id] = count;
}

}  // namespace hypersweep::geo
