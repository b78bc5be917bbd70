#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pullback/diagnostics.hpp"
#include "pullback/inclusion.hpp"
#include "pullback/sampling.hpp"
#include "pullback/serialize.hpp"
#include "pullback/systems.hpp"

namespace pullback::cli {

/// Schema violations: wrong shapes, unknown names, missing fields. These map
/// to exit code 2 and are raised during parsing, before anything runs.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SystemSpec {
    std::string name;
    json params = json::object();
};

struct DiagnosticSpec {
    std::string kind;
    std::string name;  // label used in file names and the report
    json params = json::object();
    json expected = json::object();
};

struct Scenario {
    std::uint64_t seed = 0;
    SystemSpec system;
    ScheduleSpec schedule = ScheduleSpec::geometric();
    std::string output_dir;
    std::vector<DiagnosticSpec> diagnostics;
};

// ---------------------------------------------------------------------------
// System registry
// ---------------------------------------------------------------------------

struct SystemEntry {
    std::string name;
    json param_schema;
    std::function<ProcessHandle(const json&)> make;
};

namespace detail {

inline double get_num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ScenarioError(std::string("field '") + key + "' must be a number");
    return obj[key].get<double>();
}

inline std::size_t get_size(const json& obj, const char* key, std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_unsigned())
        throw ScenarioError(std::string("field '") + key + "' must be a nonnegative integer");
    return obj[key].get<std::size_t>();
}

inline inclusion::Nonlinearity parse_nonlinearity(const json& spec) {
    const std::string name = spec.value("name", "heaviside");
    if (name == "heaviside") return inclusion::heaviside_nonlinearity();
    if (name == "sine-plus-heaviside")
        return inclusion::sine_plus_heaviside_nonlinearity(get_num(spec, "lambda", 0.5));
    throw ScenarioError("unknown nonlinearity '" + name + "'");
}

inline inclusion::Forcing parse_forcing(const json& spec) {
    const std::string name = spec.value("name", "zero");
    if (name == "zero") return inclusion::zero_forcing();
    if (name == "constant-sine")
        return inclusion::constant_sine_forcing(get_num(spec, "amplitude", 1.0));
    if (name == "sine-pulse")
        return inclusion::sine_pulse_forcing(get_num(spec, "amplitude", 1.0),
                                             get_num(spec, "t_bar", 0.0));
    throw ScenarioError("unknown forcing '" + name + "'");
}

}  // namespace detail

inline const std::vector<SystemEntry>& system_registry() {
    static const std::vector<SystemEntry> registry = [] {
        std::vector<SystemEntry> r;
        r.push_back({"drift", json::object(),
                     [](const json&) { return systems::make_drift_process(); }});
        r.push_back({"shift", json{{"truncation_dim", "integer >= 2 (default 64)"}},
                     [](const json& p) {
                         return systems::make_shift_process(
                             detail::get_size(p, "truncation_dim", 64));
                     }});
        r.push_back({"planar-ode", json::object(),
                     [](const json&) { return systems::make_planar_process(); }});
        r.push_back({"heat-switch", json{{"modes", "integer >= 2 (default 16)"}},
                     [](const json& p) {
                         return systems::make_heat_switch_process(
                             detail::get_size(p, "modes", 16));
                     }});
        r.push_back(
            {"inclusion",
             json{{"modes", "integer >= 1 (default 8)"},
                  {"dt", "time step (default 1e-3)"},
                  {"quad_points", "integer >= 4*modes (default 8*modes)"},
                  {"nonlinearity", "{name: heaviside | sine-plus-heaviside, lambda}"},
                  {"forcing", "{name: zero | constant-sine | sine-pulse, amplitude, t_bar}"}},
             [](const json& p) {
                 inclusion::SolverConfig cfg;
                 cfg.modes = detail::get_size(p, "modes", 8);
                 cfg.dt = detail::get_num(p, "dt", 1e-3);
                 cfg.quad_points = detail::get_size(p, "quad_points", 0);
                 try {
                     cfg.validate();
                     return inclusion::make_inclusion_process(
                         cfg, detail::parse_nonlinearity(p.value("nonlinearity", json::object())),
                         detail::parse_forcing(p.value("forcing", json::object())));
                 } catch (const std::invalid_argument& e) {
                     throw ScenarioError(e.what());
                 }
             }});
        r.push_back({"pure-heat", json{{"modes", "integer >= 2 (default 8)"}},
                     [](const json& p) {
                         return systems::make_pure_heat_process(
                             detail::get_size(p, "modes", 8));
                     }});
        return r;
    }();
    return registry;
}

inline ProcessHandle make_system(const SystemSpec& spec) {
    for (const auto& entry : system_registry())
        if (entry.name == spec.name) {
            try {
                return entry.make(spec.params);
            } catch (const std::invalid_argument& e) {
                throw ScenarioError(std::string("system '") + spec.name + "': " + e.what());
            }
        }
    throw ScenarioError("unknown system '" + spec.name + "'");
}

// ---------------------------------------------------------------------------
// Set builders
// ---------------------------------------------------------------------------

inline StatePoint parse_point(const json& arr, std::size_t dim) {
    if (!arr.is_array() || arr.size() != dim)
        throw ScenarioError("point must be an array of length " + std::to_string(dim));
    std::vector<double> c;
    for (const auto& v : arr) {
        if (!v.is_number()) throw ScenarioError("point coordinates must be numbers");
        c.push_back(v.get<double>());
    }
    return StatePoint(std::move(c));
}

inline SampledSet parse_set(const json& spec, const ProcessHandle& p, std::uint64_t seed) {
    if (!spec.is_object() || !spec.contains("type"))
        throw ScenarioError("set spec needs a 'type' field");
    const std::string type = spec["type"].get<std::string>();
    const std::string label = spec.value("label", type);
    try {
        if (type == "ball") {
            const auto center = spec.contains("center")
                                    ? parse_point(spec["center"], p.dimension)
                                    : StatePoint(std::vector<double>(p.dimension, 0.0));
            const double radius = detail::get_num(spec, "radius", 1.0);
            const auto count = detail::get_size(spec, "count", 16);
            const auto ball_seed =
                spec.contains("seed") ? spec["seed"].get<std::uint64_t>() : seed;
            return sample_ball(center, radius, count, ball_seed, p.metric, label);
        }
        if (type == "grid") {
            if (!spec.contains("min") || !spec.contains("max") || !spec.contains("shape"))
                throw ScenarioError("grid set needs 'min', 'max', 'shape'");
            std::vector<double> lo = spec["min"].get<std::vector<double>>();
            std::vector<double> hi = spec["max"].get<std::vector<double>>();
            std::vector<std::size_t> shape = spec["shape"].get<std::vector<std::size_t>>();
            if (lo.size() != p.dimension)
                throw ScenarioError("grid dimension does not match the system");
            return sample_grid(lo, hi, shape, label);
        }
        if (type == "points") {
            if (!spec.contains("points") || !spec["points"].is_array() || spec["points"].empty())
                throw ScenarioError("points set needs a nonempty 'points' array");
            std::vector<StatePoint> pts;
            for (const auto& row : spec["points"]) pts.push_back(parse_point(row, p.dimension));
            return SampledSet(std::move(pts), label);
        }
        if (type == "axis") {
            // value * e_{i+1} for every listed coordinate index.
            if (!spec.contains("indices") || !spec["indices"].is_array() ||
                spec["indices"].empty())
                throw ScenarioError("axis set needs a nonempty 'indices' array");
            const double value = detail::get_num(spec, "value", 1.0);
            std::vector<StatePoint> pts;
            for (const auto& idx : spec["indices"]) {
                const auto i = idx.get<std::size_t>();
                if (i >= p.dimension) throw ScenarioError("axis index out of range");
                std::vector<double> c(p.dimension, 0.0);
                c[i] = value;
                pts.emplace_back(std::move(c));
            }
            return SampledSet(std::move(pts), label);
        }
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("set '") + label + "': " + e.what());
    }
    throw ScenarioError("unknown set type '" + type + "'");
}

inline NonautonomousSet parse_family(const json& spec, const ProcessHandle& p,
                                     std::uint64_t seed) {
    if (!spec.is_object() || !spec.contains("times"))
        throw ScenarioError("family spec needs a 'times' array");
    std::vector<double> times = spec["times"].get<std::vector<double>>();
    try {
        if (spec.contains("set"))
            return NonautonomousSet::constant(times, parse_set(spec["set"], p, seed));
        if (spec.contains("sets")) {
            std::vector<SampledSet> sets;
            std::size_t i = 0;
            for (const auto& s : spec["sets"]) sets.push_back(parse_set(s, p, seed + (i++)));
            return NonautonomousSet(std::move(times), std::move(sets));
        }
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("family: ") + e.what());
    }
    throw ScenarioError("family spec needs 'set' or 'sets'");
}

// ---------------------------------------------------------------------------
// Scenario parsing
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& diagnostic_kinds() {
    static const std::vector<std::string> kinds{
        "check-axioms",       "omega-limit", "attraction", "dissipativity",
        "point-dissipativity", "flattening",  "closedness", "attractor",
        "invariance"};
    return kinds;
}

inline ScheduleSpec parse_schedule(const json& spec) {
    if (!spec.is_object()) throw ScenarioError("schedule must be an object");
    const std::string type = spec.value("type", "geometric");
    try {
        if (type == "geometric")
            return ScheduleSpec::geometric(detail::get_num(spec, "h", 1.0),
                                           detail::get_num(spec, "ratio", 1.5),
                                           detail::get_size(spec, "steps", 20));
        if (type == "linear")
            return ScheduleSpec::linear(detail::get_num(spec, "step", 1.0),
                                        detail::get_size(spec, "steps", 20));
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("schedule: ") + e.what());
    }
    throw ScenarioError("unknown schedule type '" + type + "'");
}

inline Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
    Scenario sc;
    if (!doc.contains("seed") || !doc["seed"].is_number_unsigned())
        throw ScenarioError("scenario needs a nonnegative integer 'seed' (determinism)");
    sc.seed = doc["seed"].get<std::uint64_t>();

    if (!doc.contains("system") || !doc["system"].is_object() ||
        !doc["system"].contains("name"))
        throw ScenarioError("scenario needs a 'system' object with a 'name'");
    sc.system.name = doc["system"]["name"].get<std::string>();
    sc.system.params = doc["system"].value("params", json::object());
    bool known = false;
    for (const auto& entry : system_registry()) known |= entry.name == sc.system.name;
    if (!known) throw ScenarioError("unknown system '" + sc.system.name + "'");

    if (doc.contains("schedule")) sc.schedule = parse_schedule(doc["schedule"]);
    sc.output_dir = doc.value("output_dir", "");

    if (!doc.contains("diagnostics") || !doc["diagnostics"].is_array() ||
        doc["diagnostics"].empty())
        throw ScenarioError("scenario needs a nonempty 'diagnostics' array");
    std::size_t idx = 0;
    for (const auto& d : doc["diagnostics"]) {
        if (!d.is_object() || !d.contains("kind"))
            throw ScenarioError("each diagnostic needs a 'kind'");
        DiagnosticSpec spec;
        spec.kind = d["kind"].get<std::string>();
        const auto& kinds = diagnostic_kinds();
        if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end())
            throw ScenarioError("unknown diagnostic kind '" + spec.kind + "'");
        spec.name = d.value("name", spec.kind + "-" + std::to_string(idx));
        spec.params = d.value("params", json::object());
        spec.expected = d.value("expected", json::object());
        sc.diagnostics.push_back(std::move(spec));
        ++idx;
    }
    return sc;
}

}  // namespace pullback::cli
