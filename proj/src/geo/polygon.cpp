#include "hypersweep/geo/polygon.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace hypersweep::geo {

namespace {

int orientation(const Point& a, const Point& b, const Point& c) {
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (cross > 0.0) return 1;
    if (cross < 0.0) return -1;
    return 0;
}

// Proper crossing of open segments; shared endpoints between adjacent edges
// are allowed.
bool segments_cross(const Point& p1, const Point& p2, const Point& q1,
                    const Point& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

void validate_ring(const Ring& ring, const char* what) {
    if (ring.size() < 4)
        throw InvalidPolygonError(std::string(what) +
                                  " ring needs at least four points");
    if (!(ring.front() == ring.back()))
        throw InvalidPolygonError(std::string(what) + " ring is not closed");
    const std::size_t n = ring.size() - 1;  // distinct edges
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1)
                continue;  // first and last edge are adjacent
            if (segments_cross(ring[i], ring[i + 1], ring[j], ring[j + 1]))
                throw InvalidPolygonError(std::string(what) +
                                          " ring self-intersects");
        }
    }
}

Ring ring_from_json(const nlohmann::json& coords) {
    Ring ring;
    for (const auto& pair : coords) {
        if (!pair.is_array() || pair.size() < 2)
            throw InvalidPolygonError("coordinate is not an [x, y] pair");
        ring.push_back(Point{pair[0].get<double>(), pair[1].get<double>()});
    }
    return ring;
}

Polygon polygon_from_json(const nlohmann::json& coords) {
    if (!coords.is_array() || coords.empty())
        throw InvalidPolygonError("polygon has no rings");
    Polygon poly;
    poly.exterior = ring_from_json(coords[0]);
    for (std::size_t i = 1; i < coords.size(); ++i)
        poly.holes.push_back(ring_from_json(coords[i]));
    validate(poly);
    return poly;
}

void append_geometry(std::vector<Polygon>& out, const nlohmann::json& geom) {
    const auto type = geom.at("type").get<std::string>();
    if (type == "Polygon") {
        out.push_back(polygon_from_json(geom.at("coordinates")));
    } else if (type == "MultiPolygon") {
        for (const auto& coords : geom.at("coordinates"))
            out.push_back(polygon_from_json(coords));
    } else {
        throw InvalidPolygonError("unsupported geometry type '" + type + "'");
    }
}

nlohmann::ordered_json ring_to_json(const Ring& ring) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : ring)
        arr.push_back({p.x, p.y});
    return arr;
}

}  // namespace

void validate(const Polygon& poly) {
    validate_ring(poly.exterior, "exterior");
    for (const auto& hole : poly.holes)
        validate_ring(hole, "hole");
}

std::vector<Polygon> parse_polygons(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidPolygonError(std::string("bad polygon document: ") + e.what());
    }
    std::vector<Polygon> out;
    try {
        const auto type = doc.at("type").get<std::string>();
        if (type == "FeatureCollection") {
            for (const auto& feature : doc.at("features"))
                append_geometry(out, feature.at("geometry"));
        } else {
            append_geometry(out, doc);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidPolygonError(std::string("bad polygon document: ") + e.what());
    }
    return out;
}

std::string polygons_to_json(const std::vector<Polygon>& polys) {
    nlohmann::ordered_json doc;
    doc["type"] = "FeatureCollection";
    auto features = nlohmann::ordered_json::array();
    for (const auto& poly : polys) {
        auto coords = nlohmann::ordered_json::array();
        coords.push_back(ring_to_json(poly.exterior));
        for (const auto& hole : poly.holes)
            coords.push_back(ring_to_json(hole));
        features.push_back({{"type", "Feature"},
                            {"properties", nlohmann::ordered_json::object()},
                            {"geometry",
                             {{"type", "Polygon"}, {"coordinates", std::move(coords)}}}});
    }
    doc["features"] = std::move(features);
    return doc.dump(2) + "\n";
}

namespace {

void fill_polygon(Mask& mask, const Polygon& poly, const GeoTransform& gt) {
    std::vector<const Ring*> rings;
    rings.push_back(&poly.exterior);
    for (const auto& hole : poly.holes)
        rings.push_back(&hole);

    std::vector<double> xs;
    for (int row = 0; row < mask.height; ++row) {
        const double py = gt.origin_y - (row + 0.5) * gt.pixel_size;
        xs.clear();
        for (const Ring* ring : rings) {
            for (std::size_t i = 0; i + 1 < ring->size(); ++i) {
                const Point& a = (*ring)[i];
                const Point& b = (*ring)[i + 1];
                if ((a.y > py) != (b.y > py))
                    xs.push_back(a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        if (xs.empty())
            continue;
        std::sort(xs.begin(), xs.end());
        // A center is inside when an odd number of crossings lies strictly to
        // its right. Centers grow monotonically with the column, so a single
        // pointer into the sorted crossings serves the whole row; comparing
        // the raw crossing abscissae keeps edge-on-center ties exact.
        std::size_t idx = 0;
        for (int col = 0; col < mask.width; ++col) {
            const double px = gt.origin_x + (col + 0.5) * gt.pixel_size;
            while (idx < xs.size() && xs[idx] <= px)
                ++idx;
            if ((xs.size() - idx) % 2 == 1)
                mask.at(row, col) = 1;
        }
    }
}

}  // namespace

Mask rasterize(const std::vector<Polygon>& polys, const GeoTransform& gt,
               int width, int height) {
    if (width <= 0 || height <= 0)
        throw GeoError("raster dimensions must be positive");
    if (gt.pixel_size <= 0.0)
        throw GeoError("pixel size must be positive");
    Mask mask(width, height);
    for (const auto& poly : polys) {
        validate(poly);
        fill_polygon(mask, poly, gt);
    }
    return mask;
}

}  // namespace hypersweep::geo
