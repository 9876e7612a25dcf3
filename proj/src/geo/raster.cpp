#include "hypersweep/geo/raster.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <set>
#include <utility>

#include <json.hpp>

#include "hypersweep/digest.hpp"
#include "hypersweep/fsutil.hpp"

namespace hypersweep::geo {

namespace {

std::chrono::year_month_day to_ymd(const Date& d) {
    std::chrono::year_month_day ymd{std::chrono::year{d.year},
                                    std::chrono::month{d.month},
                                    std::chrono::day{d.day}};
    if (!ymd.ok())
        throw GeoError("invalid calendar date: " + date_token(d));
    return ymd;
}

Date from_ymd(const std::chrono::year_month_day& ymd) {
    return Date{static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day())};
}

int parse_component(std::string_view text, std::size_t pos, std::size_t len) {
    int value = 0;
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len)
        throw GeoError("malformed date: " + std::string(text));
    return value;
}

}  // namespace

Date parse_date(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw GeoError("malformed date: " + std::string(iso));
    Date d;
    d.year = parse_component(iso, 0, 4);
    d.month = static_cast<unsigned>(parse_component(iso, 5, 2));
    d.day = static_cast<unsigned>(parse_component(iso, 8, 2));
    to_ymd(d);  // range check
    return d;
}

std::string date_token(const Date& d) {
    char buf[11];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
    return buf;
}

Date add_days(const Date& d, int days) {
    std::chrono::sys_days sd{to_ymd(d)};
    sd += std::chrono::days{days};
    return from_ymd(std::chrono::year_month_day{sd});
}

DateRange date_range(const Date& d1, const Date& d2, int pad_days) {
    to_ymd(d1);
    to_ymd(d2);
    if (d2 < d1)
        throw InvertedDatesError("date range end " + date_token(d2) +
                                 " precedes start " + date_token(d1));
    if (pad_days < 0)
        throw GeoError("pad_days must be non-negative");
    return DateRange{add_days(d1, -pad_days), add_days(d2, pad_days)};
}

void validate(const RasterScene& scene) {
    if (scene.id.empty())
        throw GeoError("scene id must not be empty");
    if (scene.width <= 0 || scene.height <= 0)
        throw GeoError("scene '" + scene.id + "' has non-positive dimensions");
    if (scene.geotransform.pixel_size <= 0.0)
        throw GeoError("scene '" + scene.id + "' has non-positive pixel size");
    for (const auto& [name, plane] : scene.bands) {
        if (plane.width != scene.width || plane.height != scene.height)
            throw DimensionMismatchError("band '" + name + "' of scene '" +
                                         scene.id + "' does not match scene size");
        if (plane.data.size() != static_cast<std::size_t>(plane.width) * plane.height)
            throw DimensionMismatchError("band '" + name + "' has inconsistent buffer");
        if (plane.quant <= 0.0)
            throw GeoError("band '" + name + "' has non-positive quantization");
    }
}

const Plane& band(const RasterScene& scene, const std::string& name) {
    auto it = scene.bands.find(name);
    if (it == scene.bands.end())
        throw MissingBandError(name);
    return it->second;
}

namespace {

std::vector<std::uint16_t> quantize(const Plane& plane) {
    std::vector<std::uint16_t> out(plane.data.size());
    for (std::size_t i = 0; i < plane.data.size(); ++i) {
        double v = std::llround(static_cast<double>(plane.data[i]) * plane.quant);
        out[i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, 65535.0));
    }
    return out;
}

std::string plane_bytes_le(const std::vector<std::uint16_t>& q) {
    std::string bytes(q.size() * 2, '\0');
    for (std::size_t i = 0; i < q.size(); ++i) {
        bytes[2 * i] = static_cast<char>(q[i] & 0xff);
        bytes[2 * i + 1] = static_cast<char>(q[i] >> 8);
    }
    return bytes;
}

}  // namespace

void write_scene(const std::filesystem::path& dir, const RasterScene& scene) {
    validate(scene);
    std::filesystem::create_directories(dir);

    nlohmann::ordered_json header;
    header["id"] = scene.id;
    header["width"] = scene.width;
    header["height"] = scene.height;
    header["crs"] = scene.crs;
    header["date"] = date_token(scene.date);
    header["geotransform"] = {{"origin_x", scene.geotransform.origin_x},
                              {"origin_y", scene.geotransform.origin_y},
                              {"pixel_size", scene.geotransform.pixel_size}};
    auto bands = nlohmann::ordered_json::array();
    for (const auto& [name, plane] : scene.bands) {
        bands.push_back({{"name", name}, {"file", name + ".u16"}, {"quant", plane.quant}});
        write_file_atomic(dir / (name + ".u16"), plane_bytes_le(quantize(plane)));
    }
    header["bands"] = std::move(bands);
    write_file_atomic(dir / "header.json", header.dump(2) + "\n");
}

RasterScene read_scene(const std::filesystem::path& dir) {
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(read_file(dir / "header.json"));
    } catch (const nlohmann::json::exception& e) {
        throw GeoError("bad scene header in " + dir.string() + ": " + e.what());
    }

    RasterScene scene;
    try {
        scene.id = header.at("id").get<std::string>();
        scene.width = header.at("width").get<int>();
        scene.height = header.at("height").get<int>();
        scene.crs = header.at("crs").get<std::string>();
        scene.date = parse_date(header.at("date").get<std::string>());
        const auto& gt = header.at("geotransform");
        scene.geotransform.origin_x = gt.at("origin_x").get<double>();
        scene.geotransform.origin_y = gt.at("origin_y").get<double>();
        scene.geotransform.pixel_size = gt.at("pixel_size").get<double>();

        const std::size_t pixels =
            static_cast<std::size_t>(scene.width) * scene.height;
        for (const auto& entry : header.at("bands")) {
            auto name = entry.at("name").get<std::string>();
            auto file = entry.at("file").get<std::string>();
            Plane plane(scene.width, scene.height);
            plane.quant = entry.at("quant").get<double>();
            std::string bytes = read_file(dir / file);
            if (bytes.size() != pixels * 2)
                throw GeoError("band file " + file + " has wrong length");
            for (std::size_t i = 0; i < pixels; ++i) {
                std::uint16_t v = static_cast<std::uint8_t>(bytes[2 * i]) |
                                  (static_cast<std::uint16_t>(
                                       static_cast<std::uint8_t>(bytes[2 * i + 1]))
                                   << 8);
                plane.data[i] = static_cast<float>(v / plane.quant);
            }
            scene.bands.emplace(std::move(name), std::move(plane));
        }
    } catch (const nlohmann::json::exception& e) {
        throw GeoError("bad scene header in " + dir.string() + ": " + e.what());
    }
    validate(scene);
    return scene;
}

void write_mask(const std::filesystem::path& dir, const Mask& mask,
                const std::string& name) {
    if (mask.data.size() != static_cast<std::size_t>(mask.width) * mask.height)
        throw DimensionMismatchError("mask '" + name + "' has inconsistent buffer");
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json sidecar;
    sidecar["name"] = name;
    sidecar["width"] = mask.width;
    sidecar["height"] = mask.height;
    sidecar["file"] = name + ".u8";
    write_file_atomic(dir / (name + ".u8"),
                      std::string(reinterpret_cast<const char*>(mask.data.data()),
                                  mask.data.size()));
    write_file_atomic(dir / (name + ".json"), sidecar.dump(2) + "\n");
}

Mask read_mask(const std::filesystem::path& dir, const std::string& name) {
    nlohmann::json sidecar;
    try {
        sidecar = nlohmann::json::parse(read_file(dir / (name + ".json")));
    } catch (const nlohmann::json::exception& e) {
        throw GeoError("bad mask sidecar in " + dir.string() + ": " + e.what());
    }
    Mask mask;
    mask.width = sidecar.at("width").get<int>();
    mask.height = sidecar.at("height").get<int>();
    if (mask.width <= 0 || mask.height <= 0)
        throw GeoError("mask '" + name + "' has non-positive dimensions");
    std::string bytes = read_file(dir / sidecar.at("file").get<std::string>());
    if (bytes.size() != static_cast<std::size_t>(mask.width) * mask.height)
        throw GeoError("mask file for '" + name + "' has wrong length");
    mask.data.assign(bytes.begin(), bytes.end());
    return mask;
}

std::string scene_content_hash(const RasterScene& scene) {
    validate(scene);
    std::string blob;
    blob += std::to_string(scene.width) + "x" + std::to_string(scene.height);
    for (const auto& [name, plane] : scene.bands) {
        blob += '\x1f';
        blob += name;
        blob += '\x1f';
        blob += plane_bytes_le(quantize(plane));
    }
    return sha256_hex(blob);
}

std::vector<RasterScene> dedupe(std::vector<RasterScene> scenes) {
    std::vector<RasterScene> kept;
    kept.reserve(scenes.size());
    std::set<std::string> seen_ids;
    std::set<std::string> seen_hashes;
    for (auto& scene : scenes) {
        if (!seen_ids.insert(scene.id).second)
            continue;
        if (!seen_hashes.insert(scene_content_hash(scene)).second)
            continue;
        kept.push_back(std::move(scene));
    }
    return kept;
}

}  // namespace hypersweep::geo
