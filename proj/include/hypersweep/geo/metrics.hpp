#pragma once
// Binary segmentation quality measures.

#include <cstdint>
#include <optional>

#include "hypersweep/geo/raster.hpp"

namespace hypersweep::geo {

struct SegMetrics {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
    // Ratios stay empty when their denominator is zero. f1 uses the
    // confusion-count form 2tp / (2tp + fp + fn), which is defined whenever
    // any positive appears on either side and satisfies iou = f1 / (2 - f1).
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> iou;
};

// Nonzero mask values count as foreground. Masks must agree in size.
SegMetrics seg_metrics(const Mask& predicted, const Mask& truth);

// Same ratios from raw confusion counts.
SegMetrics seg_metrics_from_counts(std::uint64_t tp, std::uint64_t fp,
                                   std::uint64_t fn, std::uint64_t tn);

}  // namespace hypersweep::geo
