#pragma once
// Heterogeneous GPU cluster model: batch-size policy, first-fit-decreasing
// placement, and a deterministic discrete-event campaign simulator.
//
// The simulator is single-threaded. Time advances only at completion events;
// identical inputs and seed produce byte-identical exported traces. Every
// GPU of a job comes from a single node.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypersweep::cluster {

struct ClusterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoFitError : ClusterError {
    explicit NoFitError(double vram_gb)
        : ClusterError("batch policy: minimum batch does not fit in " +
                       std::to_string(vram_gb) + " GB") {}
};

struct NodeSpec {
    std::string name;
    std::string gpu_model;
    int gpu_count = 0;
    double vram_per_gpu_gb = 0.0;
    int cpu_cores = 0;
    double memory_gb = 0.0;
    double throughput_factor = 1.0;  // relative speed, 1.0 = reference
};

struct ClusterTopology {
    std::vector<NodeSpec> nodes;  // declaration order is the placement order
};

void validate(const ClusterTopology& topo);  // throws ClusterError
ClusterTopology parse_topology(std::string_view json_text);

// Memory model behind dynamic batch sizing: a fixed resident overhead plus a
// per-batch-element activation cost. Bounds must be powers of two so the
// power-of-two result can honor them exactly.
struct BatchSizePolicy {
    double overhead_gb = 0.0;
    double per_sample_gb = 1.0;
    int min_bs = 1;
    int max_bs = 1;
};

// Largest power of two b with overhead + b * per_sample <= vram, clamped to
// [min_bs, max_bs]. Throws NoFitError when even min_bs violates the bound.
int dynamic_batch_size(double vram_gb, const BatchSizePolicy& policy);

struct WorkProfile {
    std::int64_t epochs = 0;
    std::int64_t samples_per_epoch = 0;
    double per_sample_cost_gpu_s = 0.0;  // gpu-seconds at reference throughput
};

struct JobRequest {
    std::string name;
    int gpu_count = 1;
    int cpu_cores = 1;
    double memory_gb = 1.0;
    std::optional<double> min_vram_gb;  // node selector
    WorkProfile work;
    BatchSizePolicy batch;
};

// epochs * samples * cost / (3600 * gpu_count * throughput_factor).
double duration_hours(const JobRequest& job, const NodeSpec& node);

struct NodeUsage {
    int gpus = 0;
    int cpus = 0;
    double memory_gb = 0.0;
};

struct Placement {
    std::size_t job_index = 0;   // into the pending list
    std::size_t node_index = 0;  // into topology.nodes
    int batch_size = 0;          // chosen for the placed node's VRAM
};

struct ScheduleResult {
    std::vector<Placement> placements;
    std::vector<std::size_t> unschedulable;  // exceed every node's total capacity
};

// First-fit-decreasing by requested gpu_count (stable on ties), nodes probed
// in declaration order against their free capacity. Jobs that fit nowhere
// right now stay pending; jobs no node could ever host are unschedulable.
ScheduleResult schedule(const std::vector<JobRequest>& pending,
                        const ClusterTopology& topo,
                        const std::vector<NodeUsage>& in_use);

enum class JobState { Pending, Scheduled, Running, Succeeded, Failed, Unschedulable };
std::string_view job_state_token(JobState state);

struct JobOutcome {
    JobState state = JobState::Pending;
    int retries = 0;
    double gpu_hours = 0.0;  // accumulated over all attempts
};

struct TraceEvent {
    double time_h = 0.0;
    std::string job;
    std::string transition;  // scheduled|start|succeeded|failed|requeue|unschedulable
    std::string node;        // empty for unschedulable
};

struct SimTrace {
    std::vector<TraceEvent> events;
    double makespan_h = 0.0;
    std::map<std::string, double> node_gpu_hours;  // busy-GPU integral per node
    std::map<std::string, JobOutcome> jobs;

    double total_gpu_hours() const;
};

struct SimParams {
    std::uint64_t seed = 0;
    double failure_rate = 0.0;  // per-attempt probability, in [0, 1)
    int retry_limit = 0;        // failed jobs re-enter pending this many times
};

SimTrace simulate(const std::vector<JobRequest>& jobs, const ClusterTopology& topo,
                  const SimParams& params);

// Line-delimited `time,job,transition,node` records plus a `#` summary block.
// Stable field order and formatting; suitable for byte-comparison.
std::string export_trace(const SimTrace& trace);

}  // namespace hypersweep::cluster
