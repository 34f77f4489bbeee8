#pragma once

// Two-level system parameters and the carrier-envelope driving field.
//
// Natural units (hbar = 1): every frequency and rate is in rad per time unit
// and envelopes are parameterized directly by their peak Rabi frequency.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include "nads/errors.hpp"

namespace nads {

struct SystemParams {
    double omega_g = 0.0;
    double omega_e = 1.0;
    double mu = 1.0;  // folds into Ω(t) = mu * envelope(t)
    double gamma_g = 0.0;
    double gamma_e = 0.0;

    double gamma_sum() const noexcept { return gamma_g + gamma_e; }

    void validate() const
    {
        if (!std::isfinite(omega_g)) throw ValidationError("system.omega_g", "must be finite");
        if (!std::isfinite(omega_e)) throw ValidationError("system.omega_e", "must be finite");
        if (!(omega_e > omega_g))
            throw ValidationError("system.omega_e", "must be > system.omega_g");
        if (!(std::isfinite(mu) && mu > 0.0)) throw ValidationError("system.mu", "must be > 0");
        if (!(gamma_g >= 0.0 && std::isfinite(gamma_g)))
            throw ValidationError("system.gamma_g", "must be >= 0");
        if (!(gamma_e >= 0.0 && std::isfinite(gamma_e)))
            throw ValidationError("system.gamma_e", "must be >= 0");
    }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

namespace envelope {

/// Continuous-wave amplitude.
struct Constant {
    double omega0 = 1.0;
    friend bool operator==(const Constant&, const Constant&) = default;
};

/// Ω₀ exp(−(t−t_c)²/τ²)
struct Gaussian {
    double omega0_peak = 1.0;
    double t_center = 0.0;
    double tau = 1.0;
    friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

/// Ω₀ sech((t−t_c)/τ)
struct Sech {
    double omega0_peak = 1.0;
    double t_center = 0.0;
    double tau = 1.0;
    friend bool operator==(const Sech&, const Sech&) = default;
};

/// No driving field. Only meaningful for the bare-basis integrator; every
/// dressed-state quantity rejects it through the Ω floor.
struct Off {
    friend bool operator==(const Off&, const Off&) = default;
};

}  // namespace envelope

using Envelope = std::variant<envelope::Constant, envelope::Gaussian, envelope::Sech, envelope::Off>;

/// Quadratic phase φ(t) = φ₀ + (β/2)(t − t_c)².
struct Chirp {
    double phi0 = 0.0;
    double beta = 0.0;
    double t_center = 0.0;
    friend bool operator==(const Chirp&, const Chirp&) = default;
};

struct FieldModel {
    double carrier_omega = 1.0;
    Envelope envelope = envelope::Constant{};
    Chirp phase{};
    double omega_floor = 1e-30;

    friend bool operator==(const FieldModel&, const FieldModel&) = default;
};

struct EnvelopeSample {
    double t = 0.0;
    double omega = 0.0;       // Ω(t)
    double log_deriv = 0.0;   // Ω⁻¹∂ₜΩ
    double dlog_deriv = 0.0;  // ∂ₜ(Ω⁻¹∂ₜΩ)
};

struct PhaseSample {
    double phi = 0.0;
    double dphi = 0.0;
    double d2phi = 0.0;
};

inline bool is_pulsed(const Envelope& env) noexcept
{
    return std::holds_alternative<envelope::Gaussian>(env) ||
           std::holds_alternative<envelope::Sech>(env);
}

/// Pulse duration parameter τ, if the envelope has one.
inline std::optional<double> pulse_tau(const Envelope& env) noexcept
{
    if (const auto* g = std::get_if<envelope::Gaussian>(&env)) return g->tau;
    if (const auto* s = std::get_if<envelope::Sech>(&env)) return s->tau;
    return std::nullopt;
}

inline std::optional<double> pulse_center(const Envelope& env) noexcept
{
    if (const auto* g = std::get_if<envelope::Gaussian>(&env)) return g->t_center;
    if (const auto* s = std::get_if<envelope::Sech>(&env)) return s->t_center;
    return std::nullopt;
}

inline void validate(const FieldModel& field)
{
    if (!std::isfinite(field.carrier_omega))
        throw ValidationError("field.carrier_omega", "must be finite");
    if (!(field.omega_floor > 0.0))
        throw ValidationError("field.omega_floor", "must be > 0");
    std::visit(
        [](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, envelope::Constant>) {
                if (!(e.omega0 > 0.0 && std::isfinite(e.omega0)))
                    throw ValidationError("field.envelope.omega0", "must be > 0");
            } else if constexpr (!std::is_same_v<T, envelope::Off>) {
                if (!(e.omega0_peak > 0.0 && std::isfinite(e.omega0_peak)))
                    throw ValidationError("field.envelope.omega0", "must be > 0");
                if (!(e.tau > 0.0 && std::isfinite(e.tau)))
                    throw ValidationError("field.envelope.tau", "must be > 0");
                if (!std::isfinite(e.t_center))
                    throw ValidationError("field.envelope.t_center", "must be finite");
            }
        },
        field.envelope);
    if (!std::isfinite(field.phase.phi0)) throw ValidationError("field.phase.phi0", "must be finite");
    if (!std::isfinite(field.phase.beta)) throw ValidationError("field.phase.beta", "must be finite");
    if (!std::isfinite(field.phase.t_center))
        throw ValidationError("field.phase.t_center", "must be finite");
}

/// Closed-form Ω(t) and its log-derivatives without the floor check.
/// The integrator uses this directly since it never divides by Ω.
inline EnvelopeSample envelope_sample(const SystemParams& params, const FieldModel& field, double t)
{
    EnvelopeSample s;
    s.t = t;
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, envelope::Constant>) {
                s.omega = params.mu * e.omega0;
            } else if constexpr (std::is_same_v<T, envelope::Gaussian>) {
                const double u = t - e.t_center;
                const double tau2 = e.tau * e.tau;
                s.omega = params.mu * e.omega0_peak * std::exp(-u * u / tau2);
                s.log_deriv = -2.0 * u / tau2;
                s.dlog_deriv = -2.0 / tau2;
            } else if constexpr (std::is_same_v<T, envelope::Sech>) {
                const double x = (t - e.t_center) / e.tau;
                const double sech = 1.0 / std::cosh(x);
                s.omega = params.mu * e.omega0_peak * sech;
                s.log_deriv = -std::tanh(x) / e.tau;
                s.dlog_deriv = -sech * sech / (e.tau * e.tau);
            }
        },
        field.envelope);
    return s;
}

/// Ω(t), Ω⁻¹∂ₜΩ and ∂ₜ(Ω⁻¹∂ₜΩ) from closed forms.
/// Throws EnvelopeUnderflow when Ω(t) < field.omega_floor.
inline EnvelopeSample rabi_at(const SystemParams& params, const FieldModel& field, double t)
{
    EnvelopeSample s = envelope_sample(params, field, t);
    if (!(s.omega >= field.omega_floor)) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "Rabi frequency %.6g below floor %.6g at t=%.17g", s.omega,
                      field.omega_floor, t);
        throw EnvelopeUnderflow(msg);
    }
    return s;
}

inline PhaseSample phase_at(const FieldModel& field, double t) noexcept
{
    const Chirp& c = field.phase;
    const double u = t - c.t_center;
    return {c.phi0 + 0.5 * c.beta * u * u, c.beta * u, c.beta};
}

/// Real off-diagonal coupling −μE(t) = −Ω(t)cos(ωt + φ(t)) of the lab-frame Hamiltonian.
inline double field_value(const FieldModel& field, const SystemParams& params, double t)
{
    const double omega = envelope_sample(params, field, t).omega;
    return -omega * std::cos(field.carrier_omega * t + phase_at(field, t).phi);
}

}  // namespace nads
