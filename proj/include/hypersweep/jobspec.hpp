#pragma once
// Rendering experiment specs into declarative batch-job manifests.
//
// Templates carry {{name}} placeholders only; no logic, no loops. Placeholder
// names resolve from the spec's axis bindings plus the reserved variables
// id, phase and sink (sink = the resolved artifact_sink prefix).

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hypersweep/gridlab.hpp"

namespace hypersweep::jobspec {

struct JobspecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnboundPlaceholderError : JobspecError {
    explicit UnboundPlaceholderError(const std::string& name)
        : JobspecError("unbound template placeholder: {{" + name + "}}") {}
};
struct BadPhaseError : JobspecError {
    explicit BadPhaseError(const std::string& token)
        : JobspecError("unknown phase: '" + token + "'") {}
};

enum class Phase { Train, Eval, Download, Norm, Label, Chip };

std::string phase_token(Phase phase);
Phase parse_phase(std::string_view token);  // throws BadPhaseError

struct ResourceRequest {
    int cpu_cores = 1;
    double memory_gb = 1.0;
    int gpu_count = 0;
    std::optional<double> min_gpu_vram_gb;  // node selector, optional

    bool operator==(const ResourceRequest&) const = default;
};

// Placeholder document a manifest is rendered from.
struct JobTemplate {
    std::string image;
    std::vector<std::string> command;
    std::string volume_name;
    std::string volume_mount;
    std::string artifact_sink;  // may reference {{id}} and {{phase}}
};

struct JobManifest {
    std::string name;  // "<spec id>-<phase>"
    Phase phase = Phase::Train;
    std::string image;
    std::vector<std::string> command;
    std::map<std::string, std::string> env;  // uppercased axis name -> value
    ResourceRequest resources;
    std::string volume_name;
    std::string volume_mount;
    std::string artifact_sink;

    bool operator==(const JobManifest&) const = default;
};

// Substitute every placeholder; throws UnboundPlaceholderError on any
// reference outside bindings + reserved vars. Deterministic.
JobManifest render(const gridlab::ExperimentSpec& spec, const JobTemplate& tmpl,
                   const ResourceRequest& resources, Phase phase);

// One train and one eval manifest; names differ only in the phase suffix.
std::vector<JobManifest> render_pair(const gridlab::ExperimentSpec& spec,
                                     const JobTemplate& tmpl,
                                     const ResourceRequest& resources);

// Canonical manifest bytes. Top-level keys in fixed order: name, phase,
// image, command, env, resources, volume, artifact_sink. Env keys sorted.
// serialize(parse(serialize(m))) == serialize(m).
std::string serialize(const JobManifest& manifest);
JobManifest parse(std::string_view json_text);

// Template file: {"image", "command", "volume": {"name","mount"}, "artifact_sink"}.
JobTemplate parse_template(std::string_view json_text);

}  // namespace hypersweep::jobspec
