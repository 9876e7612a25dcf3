#pragma once
// Cartesian expansion of hyperparameter axes into experiment specs.
//
// Axis values are opaque tokens; nothing here parses or compares them
// numerically. Expansion order is row-major over the declared axis order
// (last axis varies fastest), so spec listings are stable goldens.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypersweep::gridlab {

struct GridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyAxisError : GridError {
    explicit EmptyAxisError(const std::string& axis)
        : GridError("axis has no values: " + axis) {}
};
struct DuplicateAxisError : GridError {
    explicit DuplicateAxisError(const std::string& axis)
        : GridError("duplicate axis name: " + axis) {}
};

struct AxisDef {
    std::string name;
    std::vector<std::string> values;  // declared order preserved
};

struct ExperimentSpec {
    std::map<std::string, std::string> bindings;  // axis name -> chosen value
    std::string id;
};

// Deterministic identifier for a set of bindings: lowercase slug of the
// sorted name=value pairs plus an 8-hex-digit digest of the canonical form.
// Matches ^[a-z0-9][a-z0-9-_]*$ for any input.
std::string spec_id(const std::map<std::string, std::string>& bindings);

// Full cartesian product. Throws EmptyAxisError / DuplicateAxisError.
// Zero axes yield exactly one spec with empty bindings.
std::vector<ExperimentSpec> expand(const std::vector<AxisDef>& axes);

// Grid definition file: {"axes": [{"name": ..., "values": [...]}]}.
// Scalar values only; unknown keys are rejected. Throws GridError.
std::vector<AxisDef> parse_grid(std::string_view json_text);

// Spec listing document used between `expand` and `render`.
std::string specs_to_json(const std::vector<ExperimentSpec>& specs);
std::vector<ExperimentSpec> specs_from_json(std::string_view json_text);

}  // namespace hypersweep::gridlab
