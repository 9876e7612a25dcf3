#pragma once
// Vector polygons and their conversion to pixel masks.

#include <string>
#include <string_view>
#include <vector>

#include "hypersweep/geo/raster.hpp"

namespace hypersweep::geo {

struct InvalidPolygonError : GeoError {
    using GeoError::GeoError;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

using Ring = std::vector<Point>;  // closed: first point repeated at the end

struct Polygon {
    Ring exterior;
    std::vector<Ring> holes;
};

// A ring must be closed, carry at least four points (triangle plus closure)
// and must not self-intersect.
void validate(const Polygon& poly);

// GeoJSON-shaped input: FeatureCollection of Polygon/MultiPolygon features,
// or a bare Polygon/MultiPolygon geometry. Coordinates are [x, y] pairs.
std::vector<Polygon> parse_polygons(std::string_view json_text);
std::string polygons_to_json(const std::vector<Polygon>& polys);

// Burns the union of the polygons into a width x height mask. A pixel is set
// when its center lies inside a polygon under the even-odd rule; points on an
// edge resolve by counting only crossings strictly to the right of the
// center, so shared borders between adjacent polygons never double-fill.
Mask rasterize(const std::vector<Polygon>& polys, const GeoTransform& gt,
               int width, int height);

}  // namespace hypersweep::geo
