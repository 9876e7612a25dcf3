#pragma once
// Seeded synthetic imagery and an archive stub with two-phase retrieval.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hypersweep/geo/polygon.hpp"
#include "hypersweep/geo/raster.hpp"

namespace hypersweep::geo {

struct SyntheticParams {
    int width = 1024;
    int height = 1024;
    int polygon_count = 3;
    std::uint64_t seed = 0;
    double pixel_size = 10.0;
};

struct SyntheticScene {
    RasterScene scene;             // bands nir/red/green/blue, raw counts
    std::vector<Polygon> truth;    // burn footprints in scene coordinates
};

// Deterministic in (params.seed, id): smooth vegetation background with
// star-shaped burn polygons stamped in (nir depressed, red elevated).
SyntheticScene synth_scene(const std::string& id, const SyntheticParams& params);

// Long-term-archive retrieval contract: a scene must be requested, then
// polled until online, before it can be fetched.
class ArchiveSource {
public:
    virtual ~ArchiveSource() = default;
    virtual void request(const std::string& scene_id) = 0;
    virtual bool online(const std::string& scene_id) = 0;  // each call is one poll
    virtual SyntheticScene fetch(const std::string& scene_id) = 0;
};

struct ArchiveProtocolError : GeoError {
    using GeoError::GeoError;
};

// In-memory archive over synth_scene. A requested scene comes online after a
// fixed number of polls; fetching earlier (or without a request) throws.
class SyntheticArchive final : public ArchiveSource {
public:
    explicit SyntheticArchive(SyntheticParams params, int polls_until_online = 2);

    void request(const std::string& scene_id) override;
    bool online(const std::string& scene_id) override;
    SyntheticScene fetch(const std::string& scene_id) override;

    // Overrides the polygon count for one scene (0 gives an all-background
    // scene that chips away to nothing).
    void set_polygon_count(const std::string& scene_id, int count);

private:
    SyntheticParams params_;
    int polls_until_online_;
    std::map<std::string, int> polls_;  // polls seen since request
    std::map<std::string, int> polygon_overrides_;
};

}  // namespace hypersweep::geo
