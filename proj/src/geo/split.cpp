#include "hypersweep/geo/split.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hypersweep::geo {

std::string split_token(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    throw GeoError("unknown split");
}

Split parse_split(const std::string& token) {
    if (token == "train") return Split::Train;
    if (token == "val") return Split::Val;
    if (token == "test") return Split::Test;
    throw GeoError("unknown split '" + token + "'");
}

SplitAssignment split_by_raster(const std::map<std::string, std::size_t>& chip_counts,
                                const std::array<double, 3>& fractions) {
    if (chip_counts.empty())
        throw EmptyDatasetError("no scenes to split");
    double frac_sum = 0.0;
    for (double f : fractions) {
        if (f <= 0.0)
            throw GeoError("split fractions must be positive");
        frac_sum += f;
    }
    if (std::abs(frac_sum - 1.0) > 1e-9)
        throw GeoError("split fractions must sum to one");

    std::vector<std::pair<std::string, std::size_t>> order(chip_counts.begin(),
                                                           chip_counts.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });

    std::size_t total = 0;
    for (const auto& [id, count] : order)
        total += count;

    SplitAssignment result;
    if (total == 0) {
        for (const auto& [id, count] : order)
            result.by_scene[id] = Split::Train;
        result.starved = true;
        return result;
    }

    const double train_thr = fractions[0] * static_cast<double>(total);
    const double val_thr = (fractions[0] + fractions[1]) * static_cast<double>(total);

    Split current = Split::Train;
    double cum = 0.0;
    for (const auto& [id, count] : order) {
        result.by_scene[id] = current;
        cum += static_cast<double>(count);
        if (current == Split::Train && cum >= train_thr)
            current = Split::Val;
        else if (current == Split::Val && cum >= val_thr)
            current = Split::Test;
    }

    bool has_val = false;
    bool has_test = false;
    for (const auto& [id, split] : result.by_scene) {
        has_val |= split == Split::Val;
        has_test |= split == Split::Test;
    }
    result.starved = !has_val || !has_test;
    return result;
}

}  // namespace hypersweep::geo
