#pragma once

// Scenario files: strict JSON schema, defaults, validation, serialization.
//
// {
//   "name": "...",
//   "system":     {"omega_g", "omega_e", "mu", "gamma_g", "gamma_e"},
//   "field":      {"carrier_omega", "omega_floor",
//                  "envelope": {"kind": "constant|gaussian|sech|off", "omega0", "t_center", "tau"},
//                  "phase":    {"phi0", "beta", "t_center"}},
//   "grid":       {"t_start", "t_end", "step", "step_policy": "error|warn"},
//   "integrator": {"frame": "rotating|lab", "rtol", "atol"},
//   "outputs":    ["snapshot", "evolve", "compare"]
// }
//
// Required: system.omega_e, field.carrier_omega, field.envelope.kind,
// envelope amplitude and tau where the kind has them, and the three grid
// bounds. Everything else has a default. Unknown keys are a ParseError.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nads/errors.hpp"
#include "nads/field_model.hpp"
#include "nads/tdse_integrator.hpp"
#include "nads/time_grid.hpp"

namespace nads {

using Json = nlohmann::ordered_json;

enum class StepPolicy { Error, Warn };

enum class Output { Snapshot, Evolve, Compare };

struct GridSpec {
    double t_start = 0.0;
    double t_end = 1.0;
    double step = 0.01;
    StepPolicy step_policy = StepPolicy::Error;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct IntegratorSpec {
    Frame frame = Frame::Rotating;
    double rtol = 1e-10;
    double atol = 1e-12;

    friend bool operator==(const IntegratorSpec&, const IntegratorSpec&) = default;
};

/// Pulsed envelopes must be sampled at least this many times per τ.
inline constexpr double kSamplesPerTau = 400.0;

struct Scenario {
    std::string name = "unnamed";
    SystemParams system;
    FieldModel field;
    GridSpec grid;
    IntegratorSpec integrator;
    std::vector<Output> outputs{Output::Snapshot};
    std::vector<std::string> warnings;  // set by validation, not serialized

    TimeGrid time_grid() const { return TimeGrid::covering(grid.t_start, grid.t_end, grid.step); }
    bool wants(Output o) const { return std::find(outputs.begin(), outputs.end(), o) != outputs.end(); }

    friend bool operator==(const Scenario& a, const Scenario& b)
    {
        return a.name == b.name && a.system == b.system && a.field == b.field && a.grid == b.grid &&
               a.integrator == b.integrator && a.outputs == b.outputs;
    }
};

inline const char* to_string(Output o) noexcept
{
    switch (o) {
    case Output::Snapshot: return "snapshot";
    case Output::Evolve: return "evolve";
    case Output::Compare: return "compare";
    }
    return "?";
}

inline const char* to_string(StepPolicy p) noexcept { return p == StepPolicy::Error ? "error" : "warn"; }

/// Levenshtein distance.
inline std::size_t edit_distance(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

/// Closest candidate, or empty when nothing is plausibly a typo of `key`.
inline std::string nearest_key(std::string_view key, const std::vector<std::string>& candidates)
{
    std::string best;
    std::size_t best_d = std::max<std::size_t>(2, key.size() / 3) + 1;
    for (const auto& c : candidates) {
        const std::size_t d = edit_distance(key, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

namespace detail {

inline std::string join_path(const std::string& parent, const std::string& key)
{
    return parent.empty() ? key : parent + "." + key;
}

/// Rejects keys outside `allowed`, suggesting the nearest allowed one.
inline void check_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed)
{
    const std::vector<std::string> names(allowed.begin(), allowed.end());
    for (const auto& item : obj.items()) {
        if (std::find(names.begin(), names.end(), item.key()) != names.end()) continue;
        const std::string field = join_path(path, item.key());
        const std::string hint = nearest_key(item.key(), names);
        std::string msg = "unknown key \"" + item.key() + "\" at " + field;
        if (!hint.empty()) msg += "; did you mean \"" + hint + "\"?";
        throw ParseError(msg, field, hint);
    }
}

inline const Json& object_at(const Json& parent, const std::string& path, const char* key)
{
    const std::string field = join_path(path, key);
    if (!parent.contains(key)) throw ParseError("missing required key " + field, field);
    const Json& v = parent.at(key);
    if (!v.is_object()) throw ParseError(field + ": expected an object", field);
    return v;
}

inline std::optional<double> number_at(const Json& obj, const std::string& path, const char* key)
{
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    if (!v.is_number()) throw ParseError(join_path(path, key) + ": expected a number", join_path(path, key));
    return v.get<double>();
}

inline double required_number(const Json& obj, const std::string& path, const char* key)
{
    if (auto v = number_at(obj, path, key)) return *v;
    throw ParseError("missing required key " + join_path(path, key), join_path(path, key));
}

inline std::optional<std::string> string_at(const Json& obj, const std::string& path, const char* key)
{
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    if (!v.is_string()) throw ParseError(join_path(path, key) + ": expected a string", join_path(path, key));
    return v.get<std::string>();
}

/// Maps a string to one of `choices`, with a suggestion on mismatch.
template <class E>
E enum_value(const std::string& value, const std::string& field,
             std::initializer_list<std::pair<const char*, E>> choices)
{
    std::vector<std::string> names;
    for (const auto& [name, e] : choices) {
        if (value == name) return e;
        names.emplace_back(name);
    }
    const std::string hint = nearest_key(value, names);
    std::string msg = field + ": unknown value \"" + value + "\"";
    if (!hint.empty()) msg += "; did you mean \"" + hint + "\"?";
    throw ParseError(msg, field, hint);
}

inline SystemParams parse_system(const Json& j)
{
    const std::string path = "system";
    check_keys(j, path, {"omega_g", "omega_e", "mu", "gamma_g", "gamma_e"});
    SystemParams p;
    p.omega_g = number_at(j, path, "omega_g").value_or(p.omega_g);
    p.omega_e = required_number(j, path, "omega_e");
    p.mu = number_at(j, path, "mu").value_or(p.mu);
    p.gamma_g = number_at(j, path, "gamma_g").value_or(p.gamma_g);
    p.gamma_e = number_at(j, path, "gamma_e").value_or(p.gamma_e);
    return p;
}

inline Envelope parse_envelope(const Json& j)
{
    const std::string path = "field.envelope";
    const auto kind_name = string_at(j, path, "kind");
    if (!kind_name) throw ParseError("missing required key field.envelope.kind", "field.envelope.kind");
    enum class Kind { Constant, Gaussian, Sech, Off };
    const Kind kind = enum_value<Kind>(*kind_name, "field.envelope.kind",
                                       {{"constant", Kind::Constant},
                                        {"gaussian", Kind::Gaussian},
                                        {"sech", Kind::Sech},
                                        {"off", Kind::Off}});
    switch (kind) {
    case Kind::Off:
        check_keys(j, path, {"kind"});
        return envelope::Off{};
    case Kind::Constant:
        check_keys(j, path, {"kind", "omega0"});
        return envelope::Constant{required_number(j, path, "omega0")};
    case Kind::Gaussian:
    case Kind::Sech: {
        check_keys(j, path, {"kind", "omega0", "t_center", "tau"});
        const double peak = required_number(j, path, "omega0");
        const double tc = number_at(j, path, "t_center").value_or(0.0);
        const double tau = required_number(j, path, "tau");
        if (kind == Kind::Gaussian) return envelope::Gaussian{peak, tc, tau};
        return envelope::Sech{peak, tc, tau};
    }
    }
    return envelope::Off{};
}

inline FieldModel parse_field(const Json& j)
{
    const std::string path = "field";
    check_keys(j, path, {"carrier_omega", "omega_floor", "envelope", "phase"});
    FieldModel f;
    f.carrier_omega = required_number(j, path, "carrier_omega");
    f.omega_floor = number_at(j, path, "omega_floor").value_or(f.omega_floor);
    f.envelope = parse_envelope(object_at(j, path, "envelope"));
    // The chirp is centered on the pulse unless told otherwise.
    f.phase.t_center = pulse_center(f.envelope).value_or(0.0);
    if (j.contains("phase")) {
        const Json& ph = object_at(j, path, "phase");
        check_keys(ph, "field.phase", {"phi0", "beta", "t_center"});
        f.phase.phi0 = number_at(ph, "field.phase", "phi0").value_or(0.0);
        f.phase.beta = number_at(ph, "field.phase", "beta").value_or(0.0);
        f.phase.t_center = number_at(ph, "field.phase", "t_center").value_or(f.phase.t_center);
    }
    return f;
}

inline GridSpec parse_grid(const Json& j)
{
    const std::string path = "grid";
    check_keys(j, path, {"t_start", "t_end", "step", "step_policy"});
    GridSpec g;
    g.t_start = required_number(j, path, "t_start");
    g.t_end = required_number(j, path, "t_end");
    g.step = required_number(j, path, "step");
    if (auto policy = string_at(j, path, "step_policy")) {
        g.step_policy = enum_value<StepPolicy>(*policy, "grid.step_policy",
                                               {{"error", StepPolicy::Error}, {"warn", StepPolicy::Warn}});
    }
    return g;
}

inline IntegratorSpec parse_integrator(const Json& j)
{
    const std::string path = "integrator";
    check_keys(j, path, {"frame", "rtol", "atol"});
    IntegratorSpec s;
    if (auto frame = string_at(j, path, "frame"))
        s.frame = enum_value<Frame>(*frame, "integrator.frame", {{"rotating", Frame::Rotating}, {"lab", Frame::Lab}});
    s.rtol = number_at(j, path, "rtol").value_or(s.rtol);
    s.atol = number_at(j, path, "atol").value_or(s.atol);
    return s;
}

inline std::vector<Output> parse_outputs(const Json& j)
{
    if (!j.is_array()) throw ParseError("outputs: expected an array of strings", "outputs");
    std::vector<Output> out;
    for (const Json& v : j) {
        if (!v.is_string()) throw ParseError("outputs: expected an array of strings", "outputs");
        const Output o = enum_value<Output>(v.get<std::string>(), "outputs",
                                            {{"snapshot", Output::Snapshot},
                                             {"evolve", Output::Evolve},
                                             {"compare", Output::Compare}});
        if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
    }
    return out;
}

}  // namespace detail

/// Checks every invariant that spans more than one block. Pulsed envelopes
/// need step ≤ τ/400; under the warn policy a violation is recorded in
/// `warnings` instead of thrown.
inline void validate(Scenario& s)
{
    s.system.validate();
    validate(s.field);
    const GridSpec& g = s.grid;
    if (!(std::isfinite(g.t_start) && std::isfinite(g.t_end)))
        throw ValidationError("grid", "bounds must be finite");
    if (!(g.t_end > g.t_start)) throw ValidationError("grid.t_end", "must be > grid.t_start");
    if (!(g.step > 0.0 && std::isfinite(g.step))) throw ValidationError("grid.step", "must be > 0");
    if (!(s.integrator.rtol > 0.0)) throw ValidationError("integrator.rtol", "must be > 0");
    if (!(s.integrator.atol > 0.0)) throw ValidationError("integrator.atol", "must be > 0");

    s.warnings.clear();
    if (const auto tau = pulse_tau(s.field.envelope)) {
        const double limit = *tau / kSamplesPerTau;
        if (g.step > limit) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "must be <= tau/400 = " << limit << " (got " << g.step << ")";
            if (g.step_policy == StepPolicy::Error) throw ValidationError("grid.step", msg.str());
            s.warnings.push_back("grid.step: " + msg.str());
        }
    }
}

/// Builds and validates a scenario from parsed JSON.
inline Scenario scenario_from_json(const Json& j)
{
    using namespace detail;
    if (!j.is_object()) throw ParseError("scenario must be a JSON object");
    check_keys(j, "", {"name", "system", "field", "grid", "integrator", "outputs"});
    Scenario s;
    s.name = string_at(j, "", "name").value_or(s.name);
    s.system = parse_system(object_at(j, "", "system"));
    s.field = parse_field(object_at(j, "", "field"));
    s.grid = parse_grid(object_at(j, "", "grid"));
    if (j.contains("integrator")) s.integrator = parse_integrator(object_at(j, "", "integrator"));
    if (j.contains("outputs")) s.outputs = parse_outputs(j.at("outputs"));
    validate(s);
    return s;
}

/// Parses scenario text. `//` and `/* */` comments are allowed.
inline Scenario parse_scenario(std::string_view text)
{
    Json j;
    try {
        j = Json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
    return scenario_from_json(j);
}

inline Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.filename().string() + ": " + e.what(), e.field(), e.suggestion());
    }
}

/// Fully resolved scenario with every default written out.
inline Json to_json(const Scenario& s)
{
    Json j;
    j["name"] = s.name;
    j["system"] = {{"omega_g", s.system.omega_g},
                   {"omega_e", s.system.omega_e},
                   {"mu", s.system.mu},
                   {"gamma_g", s.system.gamma_g},
                   {"gamma_e", s.system.gamma_e}};
    Json env = std::visit(
        [](const auto& e) -> Json {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, envelope::Off>) {
                return {{"kind", "off"}};
            } else if constexpr (std::is_same_v<T, envelope::Constant>) {
                return {{"kind", "constant"}, {"omega0", e.omega0}};
            } else {
                const char* kind = std::is_same_v<T, envelope::Gaussian> ? "gaussian" : "sech";
                return {{"kind", kind}, {"omega0", e.omega0_peak}, {"t_center", e.t_center}, {"tau", e.tau}};
            }
        },
        s.field.envelope);
    j["field"] = {{"carrier_omega", s.field.carrier_omega},
                  {"omega_floor", s.field.omega_floor},
                  {"envelope", env},
                  {"phase",
                   {{"phi0", s.field.phase.phi0},
                    {"beta", s.field.phase.beta},
                    {"t_center", s.field.phase.t_center}}}};
    j["grid"] = {{"t_start", s.grid.t_start},
                 {"t_end", s.grid.t_end},
                 {"step", s.grid.step},
                 {"step_policy", to_string(s.grid.step_policy)}};
    j["integrator"] = {{"frame", to_string(s.integrator.frame)},
                       {"rtol", s.integrator.rtol},
                       {"atol", s.integrator.atol}};
    Json outputs = Json::array();
    for (Output o : s.outputs) outputs.push_back(to_string(o));
    j["outputs"] = outputs;
    return j;
}

inline std::string serialize(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

}  // namespace nads
