#pragma once
// Raster planes, scenes, calendar dates and the on-disk scene container.
//
// A scene container is a directory holding header.json plus one flat binary
// plane per band: row-major, little-endian, u16 for bands (with a per-band
// quantization factor) and u8 for masks.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypersweep::geo {

struct GeoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatchError : GeoError {
    using GeoError::GeoError;
};
struct MissingBandError : GeoError {
    explicit MissingBandError(const std::string& band)
        : GeoError("scene is missing band '" + band + "'") {}
};
struct InvertedDatesError : GeoError {
    using GeoError::GeoError;
};

struct Plane {
    int width = 0;
    int height = 0;
    double quant = 1.0;  // disk value = round(pixel * quant), clamped to u16
    std::vector<float> data;

    Plane() = default;
    Plane(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    float at(int row, int col) const {
        return data[static_cast<std::size_t>(row) * width + col];
    }
    float& at(int row, int col) {
        return data[static_cast<std::size_t>(row) * width + col];
    }
    std::size_t size() const { return data.size(); }
};

struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Mask() = default;
    Mask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int row, int col) const {
        return data[static_cast<std::size_t>(row) * width + col];
    }
    std::uint8_t& at(int row, int col) {
        return data[static_cast<std::size_t>(row) * width + col];
    }
    std::size_t size() const { return data.size(); }

    bool operator==(const Mask&) const = default;
};

// Pixel (row, col) center maps to
//   x = origin_x + (col + 0.5) * pixel_size
//   y = origin_y - (row + 0.5) * pixel_size   (north-up, origin at top-left)
struct GeoTransform {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_size = 1.0;
};

struct Date {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    auto operator<=>(const Date&) const = default;
};

Date parse_date(std::string_view iso);  // "YYYY-MM-DD"
std::string date_token(const Date& d);
Date add_days(const Date& d, int days);  // exact calendar arithmetic

struct DateRange {
    Date start;
    Date end;
};

// [d1 - pad, d2 + pad]. Throws InvertedDatesError when d1 > d2.
DateRange date_range(const Date& d1, const Date& d2, int pad_days = 30);

struct RasterScene {
    std::string id;  // tile id + acquisition date
    int width = 0;
    int height = 0;
    std::map<std::string, Plane> bands;
    GeoTransform geotransform;
    std::string crs;
    Date date;
};

void validate(const RasterScene& scene);  // bands match scene dimensions

const Plane& band(const RasterScene& scene, const std::string& name);

// Scene container IO. write_scene stores every band as <name>.u16;
// write_mask adds <name>.u8 to the same directory with its own sidecar.
void write_scene(const std::filesystem::path& dir, const RasterScene& scene);
RasterScene read_scene(const std::filesystem::path& dir);
void write_mask(const std::filesystem::path& dir, const Mask& mask,
                const std::string& name = "mask");
Mask read_mask(const std::filesystem::path& dir, const std::string& name = "mask");

// SHA-256 over dimensions, band names and quantized plane bytes.
std::string scene_content_hash(const RasterScene& scene);

// Scenes with a duplicate id or duplicate content hash collapse to the
// first occurrence; input order is otherwise preserved.
std::vector<RasterScene> dedupe(std::vector<RasterScene> scenes);

}  // namespace hypersweep::geo
