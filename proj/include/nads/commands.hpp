#pragma once

// The snapshot, evolve and sweep commands as library calls returning tables.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "nads/nads_core.hpp"
#include "nads/overlap_transitions.hpp"
#include "nads/scenario.hpp"
#include "nads/table.hpp"
#include "nads/tdse_integrator.hpp"

namespace nads {

namespace detail {

inline void push_complex(std::vector<std::string>& cols, const std::string& name)
{
    cols.push_back("Re_" + name);
    cols.push_back("Im_" + name);
}

inline void push_complex(std::vector<Cell>& row, cplx z)
{
    row.emplace_back(z.real());
    row.emplace_back(z.imag());
}

inline Table table_for(const char* command, const Scenario& s)
{
    Table t;
    t.command = command;
    t.scenario = to_json(s);
    const TimeGrid g = s.time_grid();
    t.meta.emplace_back("grid", "points=" + std::to_string(g.size) + " step=" + format_real(g.step));
    return t;
}

}  // namespace detail

/// One row per grid point: every dressed-state quantity, the overlaps and P.
inline Table cmd_snapshot(const Scenario& s)
{
    const SnapshotSeries series = snapshot_series(s.system, s.field, s.time_grid());
    const NadsOverlaps ov(series);

    Table t = detail::table_for("snapshot", s);
    t.columns = {"t", "Omega", "delta"};
    for (const char* name : {"delta_tilde", "omega_tilde", "cos_half", "sin_half", "omega_G", "omega_E"})
        detail::push_complex(t.columns, name);
    t.columns.insert(t.columns.end(), {"gg", "ee"});
    detail::push_complex(t.columns, "eg");
    t.columns.push_back("P");

    t.rows.reserve(series.size());
    for (std::size_t k = 0; k < series.size(); ++k) {
        const NadsSnapshot& n = series[k];
        std::vector<Cell> row{n.t, n.omega, n.delta};
        for (cplx z : {n.delta_tilde, n.omega_tilde, n.cos_half, n.sin_half, n.omega_G, n.omega_E})
            detail::push_complex(row, z);
        row.emplace_back(ov.gg(k));
        row.emplace_back(ov.ee(k));
        detail::push_complex(row, ov.eg(k));
        row.emplace_back(transition_probability(n));
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Integrates from |g⟩ on the scenario grid in the configured frame. With
/// `compare`, adds |c_e/c_g| from the trajectory and from the dressed-state
/// reconstruction, and their relative difference.
inline Table cmd_evolve(const Scenario& s, bool compare)
{
    const TimeGrid grid = s.time_grid();
    const Trajectory traj = evolve(s.system, s.field, grid, InitialBareState::Ground, s.integrator.frame,
                                   {s.integrator.rtol, s.integrator.atol});

    Table t = detail::table_for("evolve", s);
    t.meta.emplace_back("initial_state", "ground");
    t.meta.emplace_back("rk4_substeps", std::to_string(traj.substeps));
    t.columns = {"t"};
    detail::push_complex(t.columns, "c_g");
    detail::push_complex(t.columns, "c_e");
    t.columns.push_back("norm");

    std::optional<SnapshotSeries> series;
    std::optional<NadsOverlaps> ov;
    if (compare) {
        t.columns.insert(t.columns.end(), {"abs_ratio_tdse", "abs_ratio_nads", "ratio_rel_diff"});
        series.emplace(snapshot_series(s.system, s.field, grid));
        ov.emplace(*series);
    }

    t.rows.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<Cell> row{grid.at(k)};
        detail::push_complex(row, traj.c_g[k]);
        detail::push_complex(row, traj.c_e[k]);
        row.emplace_back(traj.norm[k]);
        if (compare) {
            const double numeric = std::abs(traj.c_e[k]) / std::abs(traj.c_g[k]);
            const double analytic = std::abs(ov->reconstruct_bare_amplitudes(k, InitialState::Ground).ratio);
            row.emplace_back(numeric);
            row.emplace_back(analytic);
            row.emplace_back(numeric > 0.0 ? std::abs(analytic / numeric - 1.0)
                                           : std::numeric_limits<double>::quiet_NaN());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepAxis {
    std::string path;  // dotted path into the resolved scenario, e.g. field.envelope.tau
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 2;
    bool log = false;

    /// Point i of `count`, endpoints exact.
    double value(std::size_t i) const
    {
        if (i == 0) return min;
        if (i + 1 == count) return max;
        const double i_d = static_cast<double>(i);
        const double n_d = static_cast<double>(count - 1);
        if (log) return std::exp(std::log(min) + (std::log(max) - std::log(min)) * i_d / n_d);
        return min + (max - min) * i_d / n_d;
    }
};

enum class Reducer { MaxP, FinalP, MeanP, MaxEG, FinalPe, MaxPe, FinalNorm };

struct ReducerInfo {
    Reducer reducer;
    const char* name;
    const char* help;
};

inline constexpr ReducerInfo kReducers[] = {
    {Reducer::MaxP, "maxP", "max over the grid of the pointwise transition probability"},
    {Reducer::FinalP, "finalP", "transition probability at the last grid point"},
    {Reducer::MeanP, "meanP", "trapezoid time average of the transition probability"},
    {Reducer::MaxEG, "maxEG", "max over the grid of |<E|G>|"},
    {Reducer::FinalPe, "finalPe", "final |c_e|^2 from the integrator"},
    {Reducer::MaxPe, "maxPe", "max over the grid of |c_e|^2 from the integrator"},
    {Reducer::FinalNorm, "finalNorm", "final |c_g|^2 + |c_e|^2 from the integrator"},
};

inline const char* to_string(Reducer r) noexcept
{
    for (const auto& info : kReducers)
        if (info.reducer == r) return info.name;
    return "?";
}

inline Reducer parse_reducer(const std::string& name)
{
    std::vector<std::string> names;
    for (const auto& info : kReducers) {
        if (name == info.name) return info.reducer;
        names.emplace_back(info.name);
    }
    const std::string hint = nearest_key(name, names);
    throw ValidationError("reduce", "unknown reducer \"" + name + "\"" +
                                        (hint.empty() ? std::string{} : "; did you mean \"" + hint + "\"?"));
}

struct SweepSpec {
    Scenario base;
    std::vector<SweepAxis> axes;
    Reducer reduce = Reducer::MaxP;
};

/// Dotted paths of every numeric leaf of the resolved scenario.
inline std::vector<std::string> numeric_paths(const Json& j, const std::string& prefix = {})
{
    std::vector<std::string> out;
    for (const auto& item : j.items()) {
        const std::string path = prefix.empty() ? item.key() : prefix + "." + item.key();
        if (item.value().is_object()) {
            auto sub = numeric_paths(item.value(), path);
            out.insert(out.end(), sub.begin(), sub.end());
        } else if (item.value().is_number()) {
            out.push_back(path);
        }
    }
    return out;
}

inline nlohmann::json_pointer<std::string> pointer_for(const std::string& dotted)
{
    std::string p;
    std::size_t start = 0;
    for (;;) {
        const std::size_t dot = dotted.find('.', start);
        p += "/" + dotted.substr(start, dot - start);
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return nlohmann::json_pointer<std::string>(p);
}

/// Parses `<path>:<min>:<max>:<count>[:log]`.
inline SweepAxis parse_axis(const std::string& text)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t colon = text.find(':', start);
        parts.push_back(text.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() < 4 || parts.size() > 5 || (parts.size() == 5 && parts[4] != "log" && parts[4] != "linear"))
        throw ValidationError("axis", "expected <path>:<min>:<max>:<count>[:log], got \"" + text + "\"");

    auto real = [&](const std::string& s, const char* what) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0' || !std::isfinite(v))
            throw ValidationError("axis", std::string(what) + " is not a finite number in \"" + text + "\"");
        return v;
    };
    SweepAxis a;
    a.path = parts[0];
    a.min = real(parts[1], "min");
    a.max = real(parts[2], "max");
    const std::string& c = parts[3];
    if (std::from_chars(c.data(), c.data() + c.size(), a.count).ec != std::errc{} ||
        std::to_string(a.count) != c)
        throw ValidationError("axis", "count is not an integer in \"" + text + "\"");
    a.log = parts.size() == 5 && parts[4] == "log";
    return a;
}

/// Rejects malformed axes before any point is computed.
inline void validate(const SweepSpec& spec)
{
    if (spec.axes.empty() || spec.axes.size() > 2) throw ValidationError("axis", "a sweep takes 1 or 2 axes");
    const Json base = to_json(spec.base);
    const auto paths = numeric_paths(base);
    for (const SweepAxis& a : spec.axes) {
        if (std::find(paths.begin(), paths.end(), a.path) == paths.end()) {
            const std::string hint = nearest_key(a.path, paths);
            throw ValidationError(a.path, "not a numeric parameter of this scenario" +
                                              (hint.empty() ? std::string{} : "; did you mean " + hint + "?"));
        }
        if (a.count < 2) throw ValidationError(a.path, "count must be >= 2");
        if (a.log && !(a.min > 0.0 && a.max > 0.0))
            throw ValidationError(a.path, "log spacing needs min and max > 0");
    }
    if (spec.axes.size() == 2 && spec.axes[0].path == spec.axes[1].path)
        throw ValidationError(spec.axes[1].path, "axis given twice");
}

/// Worker count: NADS_WORKERS if set, else the hardware concurrency.
inline std::size_t sweep_workers()
{
    if (const char* env = std::getenv("NADS_WORKERS")) {
        const std::string s(env);
        std::size_t n = 0;
        if (std::from_chars(s.data(), s.data() + s.size(), n).ec != std::errc{} || std::to_string(n) != s ||
            n == 0)
            throw ValidationError("NADS_WORKERS", "must be a positive integer, got \"" + s + "\"");
        return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Scalar summary of one scenario.
inline double reduce_scenario(const Scenario& s, Reducer r)
{
    const TimeGrid grid = s.time_grid();
    switch (r) {
    case Reducer::MaxP:
    case Reducer::FinalP:
    case Reducer::MeanP: {
        const SnapshotSeries series = snapshot_series(s.system, s.field, grid);
        std::vector<double> p(series.size());
        for (std::size_t k = 0; k < series.size(); ++k) p[k] = transition_probability(series[k]);
        if (r == Reducer::MaxP) return *std::max_element(p.begin(), p.end());
        if (r == Reducer::FinalP) return p.back();
        return cumulative_trapezoid(p, grid.step).back() / (grid.back() - grid.t0);
    }
    case Reducer::MaxEG: {
        const SnapshotSeries series = snapshot_series(s.system, s.field, grid);
        const NadsOverlaps ov(series);
        double m = 0.0;
        for (std::size_t k = 0; k < series.size(); ++k) m = std::max(m, std::abs(ov.eg(k)));
        return m;
    }
    case Reducer::FinalPe:
    case Reducer::MaxPe:
    case Reducer::FinalNorm: {
        const Trajectory traj = evolve(s.system, s.field, grid, InitialBareState::Ground, s.integrator.frame,
                                       {s.integrator.rtol, s.integrator.atol});
        if (r == Reducer::FinalPe) return std::norm(traj.c_e.back());
        if (r == Reducer::FinalNorm) return traj.norm.back();
        double m = 0.0;
        for (const cplx& c : traj.c_e) m = std::max(m, std::norm(c));
        return m;
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// One row per point, first axis outermost. A point that fails records NaN
/// and the error message; the rest of the sweep continues. Rows do not
/// depend on the worker count.
inline Table cmd_sweep(const SweepSpec& spec, std::size_t workers)
{
    validate(spec);
    const Json base = to_json(spec.base);
    const std::size_t inner = spec.axes.size() == 2 ? spec.axes[1].count : 1;
    const std::size_t total = spec.axes[0].count * inner;

    struct Result {
        double value = std::numeric_limits<double>::quiet_NaN();
        std::string error;
    };
    std::vector<std::vector<double>> coords(total);
    std::vector<Result> results(total);
    for (std::size_t n = 0; n < total; ++n) {
        coords[n].push_back(spec.axes[0].value(n / inner));
        if (spec.axes.size() == 2) coords[n].push_back(spec.axes[1].value(n % inner));
    }

    auto run_point = [&](std::size_t n) {
        Json j = base;
        for (std::size_t a = 0; a < spec.axes.size(); ++a) j[pointer_for(spec.axes[a].path)] = coords[n][a];
        try {
            results[n].value = reduce_scenario(scenario_from_json(j), spec.reduce);
        } catch (const Error& e) {
            results[n].error = e.what();
        }
    };

    workers = std::clamp<std::size_t>(workers, 1, total);
    if (workers == 1) {
        for (std::size_t n = 0; n < total; ++n) run_point(n);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t n; (n = next.fetch_add(1)) < total;) run_point(n);
            });
    }

    Table t;
    t.command = "sweep";
    t.scenario = base;
    for (const SweepAxis& a : spec.axes) {
        t.meta.emplace_back("axis", a.path + ":" + format_real(a.min) + ":" + format_real(a.max) + ":" +
                                        std::to_string(a.count) + (a.log ? ":log" : ""));
        t.columns.push_back(a.path);
    }
    t.meta.emplace_back("reduce", to_string(spec.reduce));
    t.columns.push_back(to_string(spec.reduce));
    t.columns.push_back("error");
    for (std::size_t n = 0; n < total; ++n) {
        std::vector<Cell> row(coords[n].begin(), coords[n].end());
        row.emplace_back(results[n].value);
        row.emplace_back(results[n].error);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace nads
