#include "hypersweep/cluster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <queue>
#include <random>
#include <set>

#include <json.hpp>

namespace hypersweep::cluster {

namespace {

using nlohmann::json;

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

void validate_policy(const BatchSizePolicy& p) {
    if (p.min_bs <= 0 || p.min_bs > p.max_bs) {
        throw ClusterError("batch policy: require 0 < min_bs <= max_bs");
    }
    if (!is_pow2(p.min_bs) || !is_pow2(p.max_bs)) {
        throw ClusterError("batch policy: min_bs and max_bs must be powers of two");
    }
    if (p.per_sample_gb <= 0) throw ClusterError("batch policy: per_sample_gb must be > 0");
    if (p.overhead_gb < 0) throw ClusterError("batch policy: overhead_gb must be >= 0");
}

// Whether this node could host the job with the whole machine free.
bool node_can_ever_host(const JobRequest& job, const NodeSpec& node) {
    if (job.gpu_count > node.gpu_count) return false;
    if (job.cpu_cores > node.cpu_cores) return false;
    if (job.memory_gb > node.memory_gb) return false;
    if (job.min_vram_gb && node.vram_per_gpu_gb < *job.min_vram_gb) return false;
    // VRAM below the policy's minimum batch is a capacity limit too
    const double need = job.batch.overhead_gb + job.batch.min_bs * job.batch.per_sample_gb;
    if (need > node.vram_per_gpu_gb) return false;
    return true;
}

std::string format_hours(double h) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", h);
    return buf;
}

}  // namespace

void validate(const ClusterTopology& topo) {
    std::set<std::string> names;
    for (const auto& node : topo.nodes) {
        if (node.name.empty()) throw ClusterError("topology: node with empty name");
        if (!names.insert(node.name).second) {
            throw ClusterError("topology: duplicate node name '" + node.name + "'");
        }
        if (node.gpu_count < 0) throw ClusterError("topology: negative gpu_count");
        if (node.gpu_count > 0 && node.vram_per_gpu_gb <= 0) {
            throw ClusterError("topology: node '" + node.name + "' has GPUs but no VRAM");
        }
        if (node.throughput_factor <= 0) {
            throw ClusterError("topology: throughput_factor must be > 0");
        }
        if (node.cpu_cores < 0 || node.memory_gb < 0) {
            throw ClusterError("topology: negative cpu/memory capacity");
        }
    }
}

ClusterTopology parse_topology(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ClusterError(std::string("topology is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
        throw ClusterError("topology: missing 'nodes' array");
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "nodes") throw ClusterError("topology: unknown key '" + key + "'");
    }
    ClusterTopology topo;
    for (const auto& entry : doc["nodes"]) {
        NodeSpec node;
        try {
            node.name = entry.at("name").get<std::string>();
            node.gpu_model = entry.at("gpu_model").get<std::string>();
            node.gpu_count = entry.at("gpu_count").get<int>();
            node.vram_per_gpu_gb = entry.at("vram_per_gpu_gb").get<double>();
            node.cpu_cores = entry.at("cpu_cores").get<int>();
            node.memory_gb = entry.at("memory_gb").get<double>();
            node.throughput_factor = entry.value("throughput_factor", 1.0);
        } catch (const json::exception& e) {
            throw ClusterError(std::string("topology: bad node record: ") + e.what());
        }
        topo.nodes.push_back(std::move(node));
    }
    validate(topo);
    return topo;
}

int dynamic_batch_size(double vram_gb, const BatchSizePolicy& policy) {
    validate_policy(policy);
    if (vram_gb <= 0) throw ClusterError("dynamic_batch_size: vram_gb must be > 0");
    const double budget = vram_gb - policy.overhead_gb;
    if (budget < policy.min_bs * policy.per_sample_gb) throw NoFitError(vram_gb);
    const double cap = std::floor(budget / policy.per_sample_gb);
    std::uint64_t n = cap >= 1.0 ? static_cast<std::uint64_t>(cap) : 0;
    n = std::bit_floor(n);  // largest power of two <= cap; >= min_bs by the check above
    const std::uint64_t clamped =
        std::min<std::uint64_t>(n, static_cast<std::uint64_t>(policy.max_bs));
    return static_cast<int>(clamped);
}

double duration_hours(const JobRequest& job, const NodeSpec& node) {
    if (job.gpu_count < 1) throw ClusterError("duration: gpu_count must be >= 1");
    if (node.gpu_count < job.gpu_count) {
        throw ClusterError("duration: node '" + node.name + "' lacks GPUs for '" +
                           job.name + "'");
    }
    if (job.work.epochs < 0 || job.work.samples_per_epoch < 0 ||
        job.work.per_sample_cost_gpu_s < 0) {
        throw ClusterError("duration: negative work profile");
    }
    const double gpu_seconds = static_cast<double>(job.work.epochs) *
                               static_cast<double>(job.work.samples_per_epoch) *
                               job.work.per_sample_cost_gpu_s;
    return gpu_seconds / (3600.0 * job.gpu_count * node.throughput_factor);
}

ScheduleResult schedule(const std::vector<JobRequest>& pending, const ClusterTopology& topo,
                        const std::vector<NodeUsage>& in_use) {
    validate(topo);
    if (in_use.size() != topo.nodes.size()) {
        throw ClusterError("schedule: usage vector does not match topology");
    }

    std::vector<std::size_t> order(pending.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pending[a].gpu_count > pending[b].gpu_count;
    });

    std::vector<NodeUsage> usage = in_use;
    ScheduleResult result;
    for (std::size_t job_index : order) {
        const JobRequest& job = pending[job_index];
        bool host_exists = false;
        bool placed = false;
        for (std::size_t n = 0; n < topo.nodes.size() && !placed; ++n) {
            const NodeSpec& node = topo.nodes[n];
            if (!node_can_ever_host(job, node)) continue;
            host_exists = true;
            const NodeUsage& u = usage[n];
            if (job.gpu_count > node.gpu_count - u.gpus) continue;
            if (job.cpu_cores > node.cpu_cores - u.cpus) continue;
            if (job.memory_gb > node.memory_gb - u.memory_gb) continue;
            usage[n].gpus += job.gpu_count;
            usage[n].cpus += job.cpu_cores;
            usage[n].memory_gb += job.memory_gb;
            result.placements.push_back(
                {job_index, n, dynamic_batch_size(node.vram_per_gpu_gb, job.batch)});
            placed = true;
        }
        if (!host_exists) result.unschedulable.push_back(job_index);
    }
    std::sort(result.unschedulable.begin(), result.unschedulable.end());
    return result;
}

std::string_view job_state_token(JobState state) {
    switch (state) {
        case JobState::Pending: return "pending";
        case JobState::Scheduled: return "scheduled";
        case JobState::Running: return "running";
        case JobState::Succeeded: return "succeeded";
        case JobState::Failed: return "failed";
        case JobState::Unschedulable: return "unschedulable";
    }
    return "unknown";
}

double SimTrace::total_gpu_hours() const {
    double total = 0.0;
    for (const auto& [_, h] : node_gpu_hours) total += h;
    return total;
}

SimTrace simulate(const std::vector<JobRequest>& jobs, const ClusterTopology& topo,
                  const SimParams& params) {
    validate(topo);
    if (params.failure_rate < 0.0 || params.failure_rate >= 1.0) {
        throw ClusterError("simulate: failure_rate must be in [0, 1)");
    }
    if (params.retry_limit < 0) throw ClusterError("simulate: negative retry_limit");
    {
        std::set<std::string> names;
        for (const auto& job : jobs) {
            if (job.name.empty()) throw ClusterError("simulate: job with empty name");
            if (!names.insert(job.name).second) {
                throw ClusterError("simulate: duplicate job name '" + job.name + "'");
            }
            if (job.gpu_count < 1) throw ClusterError("simulate: gpu_count must be >= 1");
        }
    }

    SimTrace trace;
    for (const auto& node : topo.nodes) trace.node_gpu_hours[node.name] = 0.0;

    std::mt19937_64 rng(params.seed);
    // canonical double in [0, 1); avoids distribution objects so the stream
    // is identical across standard libraries
    auto next_u01 = [&rng] { return (rng() >> 11) * 0x1.0p-53; };

    struct Attempt {
        double finish_h;
        std::uint64_t seq;
        std::size_t job;
        std::size_t node;
        double start_h;
    };
    auto later = [](const Attempt& a, const Attempt& b) {
        return a.finish_h != b.finish_h ? a.finish_h > b.finish_h : a.seq > b.seq;
    };
    std::priority_queue<Attempt, std::vector<Attempt>, decltype(later)> running(later);

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        trace.jobs[jobs[i].name] = JobOutcome{};
        bool host_exists = false;
        for (const auto& node : topo.nodes) host_exists |= node_can_ever_host(jobs[i], node);
        if (host_exists) {
            pending.push_back(i);
        } else {
            trace.jobs[jobs[i].name].state = JobState::Unschedulable;
            trace.events.push_back({0.0, jobs[i].name, "unschedulable", ""});
        }
    }

    std::vector<NodeUsage> usage(topo.nodes.size());
    std::uint64_t seq = 0;
    double now = 0.0;

    while (!pending.empty() || !running.empty()) {
        std::vector<JobRequest> batch;
        batch.reserve(pending.size());
        for (std::size_t i : pending) batch.push_back(jobs[i]);
        ScheduleResult placed = schedule(batch, topo, usage);

        std::set<std::size_t> remove;
        for (const Placement& p : placed.placements) {
            const std::size_t j = pending[p.job_index];
            const NodeSpec& node = topo.nodes[p.node_index];
            usage[p.node_index].gpus += jobs[j].gpu_count;
            usage[p.node_index].cpus += jobs[j].cpu_cores;
            usage[p.node_index].memory_gb += jobs[j].memory_gb;
            trace.jobs[jobs[j].name].state = JobState::Running;
            trace.events.push_back({now, jobs[j].name, "scheduled", node.name});
            trace.events.push_back({now, jobs[j].name, "start", node.name});
            running.push({now + duration_hours(jobs[j], node), seq++, j, p.node_index, now});
            remove.insert(p.job_index);
        }
        if (!remove.empty()) {
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < pending.size(); ++i) {
                if (!remove.count(i)) rest.push_back(pending[i]);
            }
            pending.swap(rest);
        }

        if (running.empty()) {
            if (!pending.empty()) {
                throw std::logic_error("simulate: pending jobs on an idle cluster");
            }
            break;
        }

        const Attempt done = running.top();
        running.pop();
        now = done.finish_h;
        const JobRequest& job = jobs[done.job];
        const NodeSpec& node = topo.nodes[done.node];
        usage[done.node].gpus -= job.gpu_count;
        usage[done.node].cpus -= job.cpu_cores;
        usage[done.node].memory_gb -= job.memory_gb;
        const double attempt_gpu_hours = job.gpu_count * (now - done.start_h);
        trace.node_gpu_hours[node.name] += attempt_gpu_hours;
        JobOutcome& outcome = trace.jobs[job.name];
        outcome.gpu_hours += attempt_gpu_hours;

        if (next_u01() < params.failure_rate) {
            trace.events.push_back({now, job.name, "failed", node.name});
            if (outcome.retries < params.retry_limit) {
                ++outcome.retries;
                outcome.state = JobState::Pending;
                trace.events.push_back({now, job.name, "requeue", node.name});
                pending.push_back(done.job);
            } else {
                outcome.state = JobState::Failed;
            }
        } else {
            outcome.state = JobState::Succeeded;
            trace.events.push_back({now, job.name, "succeeded", node.name});
        }
    }

    trace.makespan_h = now;
    return trace;
}

std::string export_trace(const SimTrace& trace) {
    std::string out = "time_h,job,transition,node\n";
    for (const auto& ev : trace.events) {
        out += format_hours(ev.time_h);
        out += ',';
        out += ev.job;
        out += ',';
        out += ev.transition;
        out += ',';
        out += ev.node;
        out += '\n';
    }
    out += "# makespan_h " + format_hours(trace.makespan_h) + "\n";
    out += "# total_gpu_hours " + format_hours(trace.total_gpu_hours()) + "\n";
    for (const auto& [node, hours] : trace.node_gpu_hours) {
        out += "# node " + node + " gpu_hours " + format_hours(hours) + "\n";
    }
    for (const auto& [name, outcome] : trace.jobs) {
        out += "# job " + name + " state " + std::string(job_state_token(outcome.state)) +
               " retries " + std::to_string(outcome.retries) + " gpu_hours " +
               format_hours(outcome.gpu_hours) + "\n";
    }
    return out;
}

}  // namespace hypersweep::cluster
