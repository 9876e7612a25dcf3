#include "hypersweep/jobspec.hpp"

#include <cctype>

#include <json.hpp>

namespace hypersweep::jobspec {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::map<std::string, Phase, std::less<>> kPhaseTokens = {
    {"train", Phase::Train}, {"eval", Phase::Eval},   {"download", Phase::Download},
    {"norm", Phase::Norm},   {"label", Phase::Label}, {"chip", Phase::Chip},
};

std::string substitute(std::string_view text,
                       const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{' && i + 1 < text.size() && text[i + 1] == '{') {
            const std::size_t close = text.find("}}", i + 2);
            if (close == std::string_view::npos) {
                throw JobspecError("unterminated placeholder in template");
            }
            const std::string name(text.substr(i + 2, close - i - 2));
            auto it = vars.find(name);
            if (it == vars.end()) throw UnboundPlaceholderError(name);
            out += it->second;
            i = close + 2;
        } else {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

void validate_resources(const ResourceRequest& r, Phase phase) {
    if (r.cpu_cores <= 0) throw JobspecError("resources: cpu_cores must be > 0");
    if (r.memory_gb <= 0) throw JobspecError("resources: memory_gb must be > 0");
    if (r.gpu_count < 0) throw JobspecError("resources: gpu_count must be >= 0");
    if (r.min_gpu_vram_gb && *r.min_gpu_vram_gb <= 0) {
        throw JobspecError("resources: min_gpu_vram_gb must be > 0");
    }
    if (phase == Phase::Train && r.gpu_count < 1) {
        throw JobspecError("resources: training requires gpu_count >= 1");
    }
}

}  // namespace

std::string phase_token(Phase phase) {
    for (const auto& [token, p] : kPhaseTokens) {
        if (p == phase) return token;
    }
    throw BadPhaseError("<invalid enum value>");
}

Phase parse_phase(std::string_view token) {
    auto it = kPhaseTokens.find(token);
    if (it == kPhaseTokens.end()) throw BadPhaseError(std::string(token));
    return it->second;
}

JobManifest render(const gridlab::ExperimentSpec& spec, const JobTemplate& tmpl,
                   const ResourceRequest& resources, Phase phase) {
    validate_resources(resources, phase);

    std::map<std::string, std::string> vars = spec.bindings;
    vars["id"] = spec.id;
    vars["phase"] = phase_token(phase);

    JobManifest m;
    m.phase = phase;
    m.name = spec.id + "-" + phase_token(phase);
    // sink resolves first so commands can reference it
    m.artifact_sink = substitute(tmpl.artifact_sink, vars);
    vars["sink"] = m.artifact_sink;
    m.image = substitute(tmpl.image, vars);
    for (const auto& arg : tmpl.command) m.command.push_back(substitute(arg, vars));
    m.volume_name = substitute(tmpl.volume_name, vars);
    m.volume_mount = substitute(tmpl.volume_mount, vars);
    m.resources = resources;
    for (const auto& [name, value] : spec.bindings) m.env[upper(name)] = value;
    return m;
}

std::vector<JobManifest> render_pair(const gridlab::ExperimentSpec& spec,
                                     const JobTemplate& tmpl,
                                     const ResourceRequest& resources) {
    return {render(spec, tmpl, resources, Phase::Train),
            render(spec, tmpl, resources, Phase::Eval)};
}

std::string serialize(const JobManifest& manifest) {
    ordered_json doc;
    doc["name"] = manifest.name;
    doc["phase"] = phase_token(manifest.phase);
    doc["image"] = manifest.image;
    doc["command"] = manifest.command;
    doc["env"] = ordered_json::object();
    for (const auto& [k, v] : manifest.env) doc["env"][k] = v;  // map is sorted
    ordered_json res;
    res["cpu_cores"] = manifest.resources.cpu_cores;
    res["memory_gb"] = manifest.resources.memory_gb;
    res["gpu_count"] = manifest.resources.gpu_count;
    if (manifest.resources.min_gpu_vram_gb) {
        res["min_gpu_vram_gb"] = *manifest.resources.min_gpu_vram_gb;
    }
    doc["resources"] = std::move(res);
    ordered_json vol;
    vol["name"] = manifest.volume_name;
    vol["mount"] = manifest.volume_mount;
    doc["volume"] = std::move(vol);
    doc["artifact_sink"] = manifest.artifact_sink;
    return doc.dump(2) + "\n";
}

JobManifest parse(std::string_view json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw JobspecError(std::string("manifest is not valid JSON: ") + e.what());
    }
    JobManifest m;
    try {
        m.name = doc.at("name").get<std::string>();
        m.phase = parse_phase(doc.at("phase").get<std::string>());
        m.image = doc.at("image").get<std::string>();
        m.command = doc.at("command").get<std::vector<std::string>>();
        for (const auto& [k, v] : doc.at("env").items()) m.env[k] = v.get<std::string>();
        const auto& res = doc.at("resources");
        m.resources.cpu_cores = res.at("cpu_cores").get<int>();
        m.resources.memory_gb = res.at("memory_gb").get<double>();
        m.resources.gpu_count = res.at("gpu_count").get<int>();
        if (res.contains("min_gpu_vram_gb")) {
            m.resources.min_gpu_vram_gb = res["min_gpu_vram_gb"].get<double>();
        }
        m.volume_name = doc.at("volume").at("name").get<std::string>();
        m.volume_mount = doc.at("volume").at("mount").get<std::string>();
        m.artifact_sink = doc.at("artifact_sink").get<std::string>();
    } catch (const ordered_json::exception& e) {
        throw JobspecError(std::string("manifest missing required field: ") + e.what());
    }
    return m;
}

JobTemplate parse_template(std::string_view json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw JobspecError(std::string("template is not valid JSON: ") + e.what());
    }
    JobTemplate t;
    try {
        t.image = doc.at("image").get<std::string>();
        t.command = doc.at("command").get<std::vector<std::string>>();
        t.volume_name = doc.at("volume").at("name").get<std::string>();
        t.volume_mount = doc.at("volume").at("mount").get<std::string>();
        t.artifact_sink = doc.at("artifact_sink").get<std::string>();
    } catch (const ordered_json::exception& e) {
        throw JobspecError(std::string("template missing required field: ") + e.what());
    }
    return t;
}

}  // namespace hypersweep::jobspec
