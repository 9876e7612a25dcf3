#include "hypersweep/geo/pipeline.hpp"

#include <set>

#include "hypersweep/fsutil.hpp"
#include "hypersweep/geo/normalize.hpp"
#include "hypersweep/geo/polygon.hpp"

namespace hypersweep::geo {

std::string stage_token(Stage s) {
    switch (s) {
        case Stage::Download: return "download";
        case Stage::Norm: return "norm";
        case Stage::Label: return "label";
        case Stage::Chip: return "chip";
    }
    throw GeoError("unknown stage");
}

std::size_t PipelineResult::total_jobs() const {
    std::size_t total = 0;
    for (const auto& s : stats)
        total += s.jobs;
    return total;
}

PipelineResult run_pipeline(const std::vector<Batch>& batches,
                            PipelineBackend& backend) {
    std::set<std::string> batch_ids;
    for (const auto& batch : batches) {
        if (batch.id.empty())
            throw GeoError("batch id must not be empty");
        if (!batch_ids.insert(batch.id).second)
            throw GeoError("duplicate batch id '" + batch.id + "'");
        if (batch.scene_ids.empty())
            throw GeoError("batch '" + batch.id + "' has no scenes");
    }

    PipelineResult result;
    for (const auto& batch : batches) {
        for (std::size_t si = 0; si < kStages.size(); ++si) {
            const Stage stage = kStages[si];
            StageJob job{batch.id, stage, batch.scene_ids};
            StageOutcome outcome;
            try {
                outcome = backend.run(job);
            } catch (const std::exception& e) {
                result.failures.push_back(StageFailure{batch.id, stage, e.what()});
                break;  // remaining stages of this batch are skipped
            }
            auto& stats = result.stats[si];
            if (stage == Stage::Chip) {
                // A chip job with nothing retained produced no output worth
                // counting; the batch simply contributes no chips.
                if (!outcome.chips.empty()) {
                    ++stats.jobs;
                    stats.bytes += outcome.bytes;
                }
                result.chips.insert(result.chips.end(), outcome.chips.begin(),
                                    outcome.chips.end());
            } else {
                ++stats.jobs;
                stats.bytes += outcome.bytes;
            }
        }
    }
    return result;
}

LocalBackend::LocalBackend(ArchiveSource& archive, LocalBackendOptions options)
    : archive_(archive), options_(std::move(options)) {
    if (options_.work_dir.empty())
        throw GeoError("local backend needs a work directory");
    if (options_.max_polls <= 0)
        throw GeoError("max_polls must be positive");
}

std::filesystem::path LocalBackend::raw_dir(const std::string& scene_id) const {
    return options_.work_dir / scene_id / "raw";
}

std::filesystem::path LocalBackend::norm_dir(const std::string& scene_id) const {
    return options_.work_dir / scene_id / "norm";
}

StageOutcome LocalBackend::run(const StageJob& job) {
    switch (job.stage) {
        case Stage::Download: return run_download(job);
        case Stage::Norm: return run_norm(job);
        case Stage::Label: return run_label(job);
        case Stage::Chip: return run_chip(job);
    }
    throw GeoError("unknown stage");
}

StageOutcome LocalBackend::run_download(const StageJob& job) {
    StageOutcome outcome;
    for (const auto& id : job.scene_ids)
        archive_.request(id);
    for (const auto& id : job.scene_ids) {
        int polls = 0;
        while (!archive_.online(id)) {
            if (++polls >= options_.max_polls)
                throw StageFailedError("scene '" + id + "' never came online");
        }
        SyntheticScene fetched = archive_.fetch(id);
        write_scene(raw_dir(id), fetched.scene);
        write_file_atomic(raw_dir(id) / "truth.json",
                          polygons_to_json(fetched.truth));
        outcome.bytes += static_cast<std::uint64_t>(fetched.scene.width) *
                         fetched.scene.height * 2 * fetched.scene.bands.size();
    }
    return outcome;
}

StageOutcome LocalBackend::run_norm(const StageJob& job) {
    StageOutcome outcome;
    for (const auto& id : job.scene_ids) {
        RasterScene raw = read_scene(raw_dir(id));
        RasterScene norm;
        norm.id = raw.id;
        norm.width = raw.width;
        norm.height = raw.height;
        norm.geotransform = raw.geotransform;
        norm.crs = raw.crs;
        norm.date = raw.date;
        for (const auto& [name, plane] : raw.bands) {
            StretchResult stretched = percentile_stretch(plane);
            if (stretched.degenerate)
                throw StageFailedError("band '" + name + "' of scene '" + id +
                                       "' is constant");
            stretched.plane.quant = 10000.0;
            norm.bands.emplace(name, std::move(stretched.plane));
        }
        write_scene(norm_dir(id), norm);
        outcome.bytes += static_cast<std::uint64_t>(norm.width) * norm.height * 2 *
                         norm.bands.size();
    }
    return outcome;
}

StageOutcome LocalBackend::run_label(const StageJob& job) {
    StageOutcome outcome;
    for (const auto& id : job.scene_ids) {
        RasterScene raw = read_scene(raw_dir(id));
        auto truth = parse_polygons(read_file(raw_dir(id) / "truth.json"));
        Mask labels = rasterize(truth, raw.geotransform, raw.width, raw.height);
        write_mask(norm_dir(id), labels, "labels");
        outcome.bytes += labels.data.size();
    }
    return outcome;
}

StageOutcome LocalBackend::run_chip(const StageJob& job) {
    StageOutcome outcome;
    for (const auto& id : job.scene_ids) {
        Mask labels = read_mask(norm_dir(id), "labels");
        auto windows = gen_windows(labels.width, labels.height, options_.chip_size,
                                   options_.overlap_frac);
        auto kept = filter_binary_chips(windows, labels, options_.min_class_frac);
        for (const auto& w : kept) {
            outcome.chips.push_back(ChipRecord{id, w});
            // three u16 image planes plus the u8 label plane per chip
            outcome.bytes += static_cast<std::uint64_t>(w.size) * w.size * 7;
        }
    }
    return outcome;
}

}  // namespace hypersweep::geo
