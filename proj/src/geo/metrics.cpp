#include "hypersweep/geo/metrics.hpp"

namespace hypersweep::geo {

SegMetrics seg_metrics_from_counts(std::uint64_t tp, std::uint64_t fp,
                                   std::uint64_t fn, std::uint64_t tn) {
    SegMetrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    const auto ratio = [](std::uint64_t num, std::uint64_t den) {
        return std::optional<double>{static_cast<double>(num) /
                                     static_cast<double>(den)};
    };
    if (tp + fp > 0)
        m.precision = ratio(tp, tp + fp);
    if (tp + fn > 0)
        m.recall = ratio(tp, tp + fn);
    if (tp + fp + fn > 0) {
        m.f1 = static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
        m.iou = ratio(tp, tp + fp + fn);
    }
    return m;
}

SegMetrics seg_metrics(const Mask& predicted, const Mask& truth) {
    if (predicted.width != truth.width || predicted.height != truth.height)
        throw DimensionMismatchError("prediction and truth masks differ in size");
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < predicted.data.size(); ++i) {
        const bool p = predicted.data[i] != 0;
        const bool t = truth.data[i] != 0;
        if (p && t)
            ++tp;
        else if (p)
            ++fp;
        else if (t)
            ++fn;
        else
            ++tn;
    }
    return seg_metrics_from_counts(tp, fp, fn, tn);
}

}  // namespace hypersweep::geo
