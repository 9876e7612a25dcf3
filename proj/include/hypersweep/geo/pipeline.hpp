#pragma once
// Staged preprocessing pipeline: download -> norm -> label -> chip, executed
// batch by batch with later stages skipped once a batch fails.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hypersweep/geo/chipping.hpp"
#include "hypersweep/geo/raster.hpp"
#include "hypersweep/geo/synthetic.hpp"

namespace hypersweep::geo {

enum class Stage { Download, Norm, Label, Chip };

inline constexpr std::array<Stage, 4> kStages{Stage::Download, Stage::Norm,
                                              Stage::Label, Stage::Chip};

std::string stage_token(Stage s);

struct Batch {
    std::string id;
    std::vector<std::string> scene_ids;
};

struct StageJob {
    std::string batch_id;
    Stage stage = Stage::Download;
    std::vector<std::string> scene_ids;
};

struct ChipRecord {
    std::string scene_id;
    ChipWindow window;

    bool operator==(const ChipRecord&) const = default;
};

struct StageOutcome {
    std::uint64_t bytes = 0;           // payload produced by the job
    std::vector<ChipRecord> chips;     // chip stage only
};

// Backends signal a failed job by throwing; StageFailedError is the
// deliberate way, but any exception is treated the same.
struct StageFailedError : GeoError {
    using GeoError::GeoError;
};

class PipelineBackend {
public:
    virtual ~PipelineBackend() = default;
    virtual StageOutcome run(const StageJob& job) = 0;
};

struct StageStats {
    std::size_t jobs = 0;
    std::uint64_t bytes = 0;
};

struct StageFailure {
    std::string batch_id;
    Stage stage = Stage::Download;
    std::string reason;
};

struct PipelineResult {
    std::array<StageStats, 4> stats{};  // indexed by Stage order
    std::vector<ChipRecord> chips;
    std::vector<StageFailure> failures;

    std::size_t total_jobs() const;
};

// Runs every batch through the stages in order. A failing job records a
// StageFailure and skips the batch's remaining stages. A chip job that
// retains nothing is not counted as a produced job.
PipelineResult run_pipeline(const std::vector<Batch>& batches,
                            PipelineBackend& backend);

struct LocalBackendOptions {
    std::filesystem::path work_dir;
    int chip_size = 256;
    double overlap_frac = 0.25;
    double min_class_frac = 0.10;
    int max_polls = 10000;  // download gives up after this many offline polls
};

// Executes stages in-process against an archive, staging scene containers
// under work_dir/<scene_id>/{raw,norm}.
class LocalBackend final : public PipelineBackend {
public:
    LocalBackend(ArchiveSource& archive, LocalBackendOptions options);

    StageOutcome run(const StageJob& job) override;

    std::filesystem::path raw_dir(const std::string& scene_id) const;
    std::filesystem::path norm_dir(const std::string& scene_id) const;

private:
    StageOutcome run_download(const StageJob& job);
    StageOutcome run_norm(const StageJob& job);
    StageOutcome run_label(const StageJob& job);
    StageOutcome run_chip(const StageJob& job);

    ArchiveSource& archive_;
    LocalBackendOptions options_;
};

}  // namespace hypersweep::geo
