#pragma once
// Scene-level train/val/test assignment.

#include <array>
#include <map>
#include <string>

#include "hypersweep/geo/raster.hpp"

namespace hypersweep::geo {

struct EmptyDatasetError : GeoError {
    using GeoError::GeoError;
};

enum class Split { Train, Val, Test };

std::string split_token(Split s);
Split parse_split(const std::string& token);

struct SplitAssignment {
    std::map<std::string, Split> by_scene;
    // Set when val or test received no scenes (e.g. a single-scene dataset);
    // every chip still lands in train so the run can proceed.
    bool starved = false;
};

// Whole scenes are assigned greedily so chips from one acquisition never
// straddle splits: scenes ordered by descending chip count (ties by id) feed
// train until its cumulative chip share reaches the train fraction, then val
// until train+val, and the remainder goes to test. Each boundary closes only
// after the split took at least one scene.
SplitAssignment split_by_raster(const std::map<std::string, std::size_t>& chip_counts,
                                const std::array<double, 3>& fractions = {0.6, 0.2,
                                                                          0.2});

}  // namespace hypersweep::geo
