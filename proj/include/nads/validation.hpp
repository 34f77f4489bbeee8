#pragma once

// Built-in invariant suite behind `nads validate`. Every check reports its
// worst measured deviation against a fixed bound.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "nads/nads_core.hpp"
#include "nads/overlap_transitions.hpp"
#include "nads/scenario.hpp"
#include "nads/tdse_integrator.hpp"

namespace nads {

struct CheckResult {
    std::string name;
    std::string description;
    double worst = 0.0;
    double bound = 0.0;
    bool lower_bound = false;  // pass when worst > bound instead of worst < bound
    bool passed = false;
    std::string error;  // set when the check itself threw
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
    const CheckResult* find(const std::string& name) const
    {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// Test seam: applied to every snapshot of the dressed-state scenario family
/// before the checks read it.
struct ValidationHooks {
    std::function<void(NadsSnapshot&)> mutate_snapshot;
};

namespace detail {

inline Scenario make_scenario(std::string name, SystemParams p, double carrier, Envelope env, Chirp chirp,
                              GridSpec grid)
{
    Scenario s;
    s.name = std::move(name);
    s.system = p;
    s.field.carrier_omega = carrier;
    s.field.envelope = env;
    s.field.phase = chirp;
    s.grid = grid;
    validate(s);
    return s;
}

}  // namespace detail

/// Dressed-state scenario family: damping on/off, chirp on/off, constant,
/// Gaussian and sech envelopes. The shipped files of the same names match.
inline std::vector<Scenario> reference_scenarios()
{
    using detail::make_scenario;
    return {
        make_scenario("static_cw", {0.0, 5.0, 1.0, 0.0, 0.0}, 4.0, envelope::Constant{0.5}, {}, {0.0, 50.0, 0.05}),
        make_scenario("static_damped", {0.0, 5.0, 1.0, 0.02, 0.1}, 4.0, envelope::Constant{0.5}, {},
                      {0.0, 50.0, 0.05}),
        make_scenario("chirped_cw", {0.0, 5.0, 1.0, 0.0, 0.0}, 4.0, envelope::Constant{0.5}, {0.0, 0.02, 0.0},
                      {-50.0, 50.0, 0.05}),
        make_scenario("gaussian_chirped_damped", {0.0, 5.0, 1.0, 0.05, 0.15}, 4.5,
                      envelope::Gaussian{2.0, 0.0, 20.0}, {0.0, 0.01, 0.0}, {-60.0, 60.0, 0.05}),
        make_scenario("sech_pulse", {0.0, 5.0, 1.0, 0.0, 0.05}, 4.8, envelope::Sech{1.0, 0.0, 10.0}, {},
                      {-60.0, 60.0, 0.025}),
    };
}

/// Slow Gaussian used for the analytic-versus-integrator amplitude check.
inline Scenario slow_gaussian_scenario()
{
    Scenario s = detail::make_scenario("slow_gaussian", {0.0, 5.0, 1.0, 0.0, 0.0}, 4.0,
                                       envelope::Gaussian{0.3, 0.0, 200.0}, {}, {-1200.0, 1200.0, 0.5});
    s.outputs = {Output::Snapshot, Output::Evolve, Output::Compare};
    return s;
}

/// Relative deviation |a − b| / max(|b|, floor).
inline double rel_dev(cplx a, cplx b, double floor = 1e-300)
{
    return std::abs(a - b) / std::max(std::abs(b), floor);
}

inline ValidationReport run_validation(const ValidationHooks& hooks = {})
{
    ValidationReport report;
    auto check = [&](std::string name, std::string description, double bound, bool lower, auto&& measure) {
        CheckResult c{std::move(name), std::move(description), 0.0, bound, lower, false, {}};
        try {
            c.worst = measure();
            c.passed = lower ? c.worst > bound : c.worst < bound;
        } catch (const std::exception& e) {
            c.error = e.what();
            c.worst = std::numeric_limits<double>::quiet_NaN();
        }
        report.checks.push_back(std::move(c));
    };

    std::vector<SnapshotSeries> family;
    for (const Scenario& s : reference_scenarios()) {
        family.push_back(snapshot_series(s.system, s.field, s.time_grid()));
        if (hooks.mutate_snapshot)
            for (auto& snap : family.back().snapshots) hooks.mutate_snapshot(snap);
    }
    auto over_family = [&](auto&& per_point) {
        double worst = 0.0;
        for (const auto& series : family)
            for (std::size_t k = 0; k < series.size(); ++k) worst = std::max(worst, per_point(series, k));
        return worst;
    };

    check("trig_identity", "|COS^2 + SIN^2 - 1| at every grid point of the scenario family", 1e-10, false, [&] {
        return over_family([](const SnapshotSeries& s, std::size_t k) {
            return std::abs(s[k].cos_half * s[k].cos_half + s[k].sin_half * s[k].sin_half - 1.0);
        });
    });

    check("lambda_consistency",
          "Lambda_1 + Lambda_2 = detuning and Lambda_2 solves x^2 - dx - (Omega^2 - 2i d') / 4 = 0", 1e-9, false,
          [&] {
              return over_family([](const SnapshotSeries& s, std::size_t k) {
                  const NadsSnapshot& n = s[k];
                  const double scale = std::max({std::abs(n.delta_tilde), std::abs(n.omega_tilde), n.omega});
                  const cplx c0 = 0.25 * (n.omega * n.omega - 2.0 * I * n.d_delta_tilde);
                  const cplx quad = n.lambda2 * n.lambda2 - n.delta_tilde * n.lambda2 - c0;
                  return std::max(std::abs(n.lambda1 + n.lambda2 - n.delta_tilde) / scale,
                                  std::abs(quad) / (scale * scale));
              });
          });

    check("mixing_definition", "COS^2 Omega~ = Lambda~_1 and SIN^2 Omega~ = -Lambda~_2", 1e-10, false, [&] {
        return over_family([](const SnapshotSeries& s, std::size_t k) {
            const NadsSnapshot& n = s[k];
            const double scale = std::abs(n.omega_tilde);
            return std::max(std::abs(n.cos_half * n.cos_half * n.omega_tilde - n.lambda_t1),
                            std::abs(n.sin_half * n.sin_half * n.omega_tilde + n.lambda_t2)) /
                   scale;
        });
    });

    check("adiabatic_limit", "max P for 10 static undamped unchirped draws", 1e-12, false, [&] {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double detune = (u(rng) < 0.5 ? -1.0 : 1.0) * (0.05 + 2.0 * u(rng));
            const SystemParams p{0.0, 5.0, 1.0, 0.0, 0.0};
            FieldModel f;
            f.carrier_omega = 5.0 - detune;
            f.envelope = envelope::Constant{0.05 + 3.0 * u(rng)};
            const auto series = snapshot_series(p, f, TimeGrid::covering(0.0, 20.0, 0.1));
            for (const auto& n : series.snapshots) worst = std::max(worst, transition_probability(n));
        }
        return worst;
    });

    check("probability_bounds", "distance of P outside [0, 1] over 10^4 random (SIN, COS) pairs", 1e-15, false, [&] {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> n(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double scale = std::pow(10.0, 4.0 * n(rng));
            const cplx s{scale * n(rng), scale * n(rng)};
            const cplx c{n(rng), n(rng)};
            const double p = transition_probability(s, c);
            worst = std::max({worst, -p, p - 1.0});
        }
        return worst;
    });

    check("microreversibility", "|P(G->E) - P(E->G)| over the scenario family", 1e-15, false, [&] {
        return over_family([](const SnapshotSeries& s, std::size_t k) {
            return std::abs(transition_probability(s[k]) - transition_probability_reverse(s[k]));
        });
    });

    check("exponential_cancellation", "pointwise P versus P built from the overlap matrix elements", 1e-9, false,
          [&] {
              double worst = 0.0;
              for (const auto& series : family) {
                  const NadsOverlaps ov(series);
                  for (std::size_t k = 0; k < series.size(); ++k)
                      worst = std::max(worst, std::abs(ov.transition_probability_via_overlaps(k) -
                                                       transition_probability(series[k])));
              }
              return worst;
          });

    check("overlap_hermiticity", "|<G|E> - conj(<E|G>)| relative to max(1, |<E|G>|)", 1e-12, false, [&] {
        double worst = 0.0;
        for (const auto& series : family) {
            const NadsOverlaps ov(series);
            for (std::size_t k = 0; k < series.size(); ++k)
                worst = std::max(worst,
                                 std::abs(ov.ge(k) - std::conj(ov.eg(k))) / std::max(1.0, std::abs(ov.eg(k))));
        }
        return worst;
    });

    check("overlap_positivity", "min of <G|G> and <E|E> over the scenario family", 0.0, true, [&] {
        double least = HUGE_VAL;
        for (const auto& series : family) {
            const NadsOverlaps ov(series);
            for (std::size_t k = 0; k < series.size(); ++k) least = std::min({least, ov.gg(k), ov.ee(k)});
        }
        return least;
    });

    check("orthogonality_static", "max |<E|G>| with every nonadiabatic factor off", 1e-12, false, [&] {
        const auto& series = family.at(0);
        const NadsOverlaps ov(series);
        double worst = 0.0;
        for (std::size_t k = 0; k < series.size(); ++k) worst = std::max(worst, std::abs(ov.eg(k)));
        return worst;
    });

    check("orthogonality_broken", "|<E|G>| at the center of the chirped damped Gaussian", 1e-6, true, [&] {
        const auto& series = family.at(3);
        const NadsOverlaps ov(series);
        return std::abs(ov.eg((series.size() - 1) / 2));
    });

    const SystemParams resonant{0.0, 5.0, 1.0, 0.0, 0.0};
    FieldModel cw;
    cw.carrier_omega = 5.0;
    cw.envelope = envelope::Constant{0.2};

    check("rabi_oracle", "|P_e - sin^2(Omega t / 2)| on a rotating-frame pi pulse", 1e-8, false, [&] {
        const auto grid = TimeGrid::covering(0.0, std::numbers::pi / 0.2, 0.05);
        const auto traj = evolve(resonant, cw, grid, InitialBareState::Ground, Frame::Rotating);
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.size(); ++k)
            worst = std::max(worst, std::abs(std::norm(traj.c_e[k]) - rabi_oracle(0.2, grid.at(k)).second));
        return worst;
    });

    check("decay_oracle", "|norm - exp(-gamma_e t)| for a field-free excited state", 1e-8, false, [&] {
        const SystemParams p{0.0, 5.0, 1.0, 0.3, 0.5};
        FieldModel off;
        off.carrier_omega = 5.0;
        off.envelope = envelope::Off{};
        const auto grid = TimeGrid::covering(0.0, 2.0, 0.01);
        double worst = 0.0;
        for (Frame frame : {Frame::Lab, Frame::Rotating}) {
            const auto traj = evolve(p, off, grid, InitialBareState::Excited, frame);
            for (std::size_t k = 0; k < traj.size(); ++k)
                worst = std::max(worst, std::abs(traj.norm[k] - std::exp(-0.5 * grid.at(k))));
        }
        return worst;
    });

    check("landau_zener", "|survival - exp(-2 pi V^2 / alpha)| for V in {0.1, 0.25, 0.5}, alpha = 1", 1e-3, false,
          [&] {
              double worst = 0.0;
              for (double v : {0.1, 0.25, 0.5})
                  worst = std::max(worst, std::abs(landau_zener_survival(v, 1.0, 40.0) - lz_oracle(v, 1.0)));
              return worst;
          });

    check("slow_gaussian_ratio", "relative gap between reconstructed and integrated |c_e/c_g| at pulse center",
          0.05, false, [&] {
              const Scenario s = slow_gaussian_scenario();
              const TimeGrid grid = s.time_grid();
              const auto series = snapshot_series(s.system, s.field, grid);
              const NadsOverlaps ov(series);
              const std::size_t center = (grid.size - 1) / 2;
              const double analytic = std::abs(ov.reconstruct_bare_amplitudes(center, InitialState::Ground).ratio);
              const auto traj = evolve(s.system, s.field, grid, InitialBareState::Ground, Frame::Rotating);
              return std::abs(analytic / std::abs(traj.c_e[center] / traj.c_g[center]) - 1.0);
          });

    check("envelope_derivatives", "analytic versus finite-difference envelope log-derivatives, 10^3 points", 1e-6,
          false, [&] {
              std::mt19937_64 rng(3);
              std::uniform_real_distribution<double> u(0.0, 1.0);
              const SystemParams unit;
              double worst = 0.0;
              for (int i = 0; i < 1000; ++i) {
                  const double tau = 0.5 * std::pow(2000.0, u(rng));
                  const double tc = (u(rng) - 0.5) * 200.0;
                  FieldModel f;
                  if (i % 2 == 0)
                      f.envelope = envelope::Gaussian{0.01 + 5.0 * u(rng), tc, tau};
                  else
                      f.envelope = envelope::Sech{0.01 + 5.0 * u(rng), tc, tau};
                  const double t = tc + (u(rng) - 0.5) * 12.0 * tau;
                  const double h = 1e-5 * tau;
                  const auto s = envelope_sample(unit, f, t);
                  const auto lo = envelope_sample(unit, f, t - h);
                  const auto hi = envelope_sample(unit, f, t + h);
                  const double fd1 = (hi.omega - lo.omega) / (2 * h) / s.omega;
                  const double fd2 = (hi.log_deriv - lo.log_deriv) / (2 * h);
                  worst = std::max({worst,
                                    std::abs(fd1 - s.log_deriv) / std::max(std::abs(s.log_deriv), 1.0 / tau),
                                    std::abs(fd2 - s.dlog_deriv) /
                                        std::max(std::abs(s.dlog_deriv), 1.0 / (tau * tau))});
              }
              return worst;
          });

    check("rk4_order", "|error(h) / error(h/2) - 16| on the resonant pi pulse", 1.0, false, [&] {
        const double t_pi = std::numbers::pi / 0.2;
        const auto grid = TimeGrid::covering(0.0, t_pi, t_pi / 8);
        auto error = [&](std::size_t m) {
            const auto c = evolve_fixed(resonant, cw, grid, initial_state(InitialBareState::Ground),
                                        Frame::Rotating, m)
                               .final_state();
            return std::abs(c.g) + std::abs(c.e - cplx(0.0, 1.0));
        };
        return std::abs(error(2) / error(4) - 16.0);
    });

    return report;
}

inline std::string format_check_value(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

inline void write_report_text(std::ostream& out, const ValidationReport& r)
{
    for (const auto& c : r.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << "  worst=" << format_check_value(c.worst)
            << (c.lower_bound ? " > " : " < ") << format_check_value(c.bound);
        if (!c.error.empty()) out << "  error: " << c.error;
        out << "\n";
    }
    out << (r.passed() ? "all checks passed" : "some checks FAILED") << "\n";
}

inline void write_report_json(std::ostream& out, const ValidationReport& r)
{
    Json j;
    j["passed"] = r.passed();
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json e;
        e["name"] = c.name;
        e["description"] = c.description;
        e["passed"] = c.passed;
        e["worst"] = std::isfinite(c.worst) ? Json(c.worst) : Json(nullptr);
        e["bound"] = c.bound;
        e["comparison"] = c.lower_bound ? ">" : "<";
        if (!c.error.empty()) e["error"] = c.error;
        checks.push_back(e);
    }
    j["checks"] = checks;
    out << j.dump(2) << "\n";
}

}  // namespace nads
