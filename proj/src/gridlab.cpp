#include "hypersweep/gridlab.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

#include "hypersweep/digest.hpp"

namespace hypersweep::gridlab {

namespace {

using nlohmann::json;

// name=value pairs sorted by name, joined with an unambiguous separator.
std::string canonical_form(const std::map<std::string, std::string>& bindings) {
    std::string out;
    for (const auto& [name, value] : bindings) {  // std::map iterates sorted
        if (!out.empty()) out.push_back('\x1f');
        out += name;
        out.push_back('=');
        out += value;
    }
    return out;
}

// Lowercase, keep [a-z0-9_], map the rest to '-', collapse runs and trim.
std::string slugify(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            out.push_back(static_cast<char>(std::tolower(u)));
        } else if (c == '_') {
            out.push_back('_');
        } else if (out.empty() || out.back() != '-') {
            out.push_back('-');
        }
    }
    while (!out.empty() && out.front() == '-') out.erase(out.begin());
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out;
}

bool valid_axis_name(const std::string& name) {
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

std::string scalar_to_token(const json& v, const std::string& axis) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    throw GridError("axis '" + axis + "': values must be scalars");
}

}  // namespace

std::string spec_id(const std::map<std::string, std::string>& bindings) {
    const std::string canon = canonical_form(bindings);
    const std::string digest = short_digest(canon);
    std::string slug;
    for (const auto& [name, value] : bindings) {
        if (!slug.empty()) slug.push_back('-');
        slug += slugify(name);
        slug.push_back('-');
        slug += slugify(value);
    }
    slug = slugify(slug);  // collapse separators introduced by empty values
    if (slug.empty()) return digest;
    return slug + "-" + digest;
}

std::vector<ExperimentSpec> expand(const std::vector<AxisDef>& axes) {
    std::set<std::string> seen;
    for (const auto& axis : axes) {
        if (!valid_axis_name(axis.name)) {
            throw GridError("invalid axis name: '" + axis.name + "'");
        }
        if (!seen.insert(axis.name).second) throw DuplicateAxisError(axis.name);
        if (axis.values.empty()) throw EmptyAxisError(axis.name);
    }

    std::size_t total = 1;
    for (const auto& axis : axes) total *= axis.values.size();

    std::vector<ExperimentSpec> specs;
    specs.reserve(total);
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        ExperimentSpec spec;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            spec.bindings[axes[a].name] = axes[a].values[idx[a]];
        }
        spec.id = spec_id(spec.bindings);
        specs.push_back(std::move(spec));
        // odometer increment, last axis fastest
        for (std::size_t a = axes.size(); a-- > 0;) {
            if (++idx[a] < axes[a].values.size()) break;
            idx[a] = 0;
        }
    }
    return specs;
}

std::vector<AxisDef> parse_grid(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw GridError(std::string("grid file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw GridError("grid file: top level must be an object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "axes") throw GridError("grid file: unknown key '" + key + "'");
    }
    if (!doc.contains("axes") || !doc["axes"].is_array()) {
        throw GridError("grid file: missing 'axes' array");
    }

    std::vector<AxisDef> axes;
    for (const auto& entry : doc["axes"]) {
        if (!entry.is_object()) throw GridError("grid file: axis entries must be objects");
        for (const auto& [key, _] : entry.items()) {
            if (key != "name" && key != "values") {
                throw GridError("grid file: unknown axis key '" + key + "'");
            }
        }
        if (!entry.contains("name") || !entry["name"].is_string()) {
            throw GridError("grid file: axis missing string 'name'");
        }
        if (!entry.contains("values") || !entry["values"].is_array()) {
            throw GridError("grid file: axis missing 'values' array");
        }
        AxisDef axis;
        axis.name = entry["name"].get<std::string>();
        for (const auto& v : entry["values"]) {
            axis.values.push_back(scalar_to_token(v, axis.name));
        }
        axes.push_back(std::move(axis));
    }
    return axes;
}

std::string specs_to_json(const std::vector<ExperimentSpec>& specs) {
    json doc;
    doc["specs"] = json::array();
    for (const auto& spec : specs) {
        json entry;
        entry["id"] = spec.id;
        entry["bindings"] = json(spec.bindings);
        doc["specs"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

std::vector<ExperimentSpec> specs_from_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw GridError(std::string("spec listing is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("specs") || !doc["specs"].is_array()) {
        throw GridError("spec listing: missing 'specs' array");
    }
    std::vector<ExperimentSpec> specs;
    for (const auto& entry : doc["specs"]) {
        ExperimentSpec spec;
        spec.bindings = entry.at("bindings").get<std::map<std::string, std::string>>();
        spec.id = entry.at("id").get<std::string>();
        if (spec.id != spec_id(spec.bindings)) {
            throw GridError("spec listing: id does not match bindings for '" + spec.id + "'");
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

}  // namespace hypersweep::gridlab
