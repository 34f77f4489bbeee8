#pragma once

// Reference integrator for the damped two-level Schrödinger equation in the
// bare basis, plus closed-form oracles (Rabi flopping, Landau–Zener).
//
// Lab frame keeps the full real field −Ω(t)cos(ωt + φ(t)). The rotating
// frame uses a_g = c_g e^{iω_g t}, a_e = c_e e^{i(ω_g + ω)t + iφ(t)} and
// applies the rotating-wave approximation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "nads/errors.hpp"
#include "nads/field_model.hpp"
#include "nads/time_grid.hpp"

namespace nads {

enum class Frame { Lab, Rotating };

inline const char* to_string(Frame f) noexcept { return f == Frame::Lab ? "lab" : "rotating"; }

struct TwoLevelState {
    std::complex<double> g;
    std::complex<double> e;

    TwoLevelState& operator+=(const TwoLevelState& o) noexcept
    {
        g += o.g;
        e += o.e;
        return *this;
    }
    friend TwoLevelState operator+(TwoLevelState a, const TwoLevelState& b) noexcept { return a += b; }
    friend TwoLevelState operator*(double s, const TwoLevelState& a) noexcept { return {s * a.g, s * a.e}; }

    double norm() const noexcept { return std::norm(g) + std::norm(e); }
};

enum class InitialBareState { Ground, Excited };

inline TwoLevelState initial_state(InitialBareState init) noexcept
{
    return init == InitialBareState::Ground ? TwoLevelState{1.0, 0.0} : TwoLevelState{0.0, 1.0};
}

struct Trajectory {
    TimeGrid grid;
    std::vector<std::complex<double>> c_g;
    std::vector<std::complex<double>> c_e;
    std::vector<double> norm;
    Frame frame = Frame::Rotating;
    std::size_t substeps = 1;  // RK4 steps per grid interval

    std::size_t size() const noexcept { return c_g.size(); }
    TwoLevelState state(std::size_t k) const { return {c_g.at(k), c_e.at(k)}; }
    TwoLevelState final_state() const { return state(size() - 1); }
};

struct IntegratorTolerance {
    double rtol = 1e-10;
    double atol = 1e-12;
};

/// Time derivative of the bare amplitudes.
inline TwoLevelState rhs(double t, const TwoLevelState& c, const SystemParams& params,
                         const FieldModel& field, Frame frame)
{
    constexpr std::complex<double> i{0.0, 1.0};
    if (frame == Frame::Lab) {
        const double v = field_value(field, params, t);
        return {-i * std::complex<double>{params.omega_g, -0.5 * params.gamma_g} * c.g - i * v * c.e,
                -i * std::complex<double>{params.omega_e, -0.5 * params.gamma_e} * c.e - i * v * c.g};
    }
    const double half_rabi = 0.5 * envelope_sample(params, field, t).omega;
    const double delta = params.omega_e - params.omega_g - field.carrier_omega - phase_at(field, t).dphi;
    return {-0.5 * params.gamma_g * c.g + i * half_rabi * c.e,
            std::complex<double>{-0.5 * params.gamma_e, -delta} * c.e + i * half_rabi * c.g};
}

/// Classic RK4 with a fixed number of substeps per grid interval.
inline Trajectory evolve_fixed(const SystemParams& params, const FieldModel& field, const TimeGrid& grid,
                               TwoLevelState c0, Frame frame, std::size_t substeps)
{
    Trajectory traj;
    traj.grid = grid;
    traj.frame = frame;
    traj.substeps = substeps;
    traj.c_g.reserve(grid.size);
    traj.c_e.reserve(grid.size);
    traj.norm.reserve(grid.size);

    auto record = [&](const TwoLevelState& c) {
        traj.c_g.push_back(c.g);
        traj.c_e.push_back(c.e);
        traj.norm.push_back(c.norm());
    };

    TwoLevelState c = c0;
    record(c);
    const double h = grid.step / static_cast<double>(substeps);
    for (std::size_t k = 0; k + 1 < grid.size; ++k) {
        const double t_k = grid.at(k);
        for (std::size_t j = 0; j < substeps; ++j) {
            const double t = t_k + static_cast<double>(j) * h;
            const TwoLevelState k1 = rhs(t, c, params, field, frame);
            const TwoLevelState k2 = rhs(t + 0.5 * h, c + (0.5 * h) * k1, params, field, frame);
            const TwoLevelState k3 = rhs(t + 0.5 * h, c + (0.5 * h) * k2, params, field, frame);
            const TwoLevelState k4 = rhs(t + h, c + h * k3, params, field, frame);
            c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        record(c);
    }
    return traj;
}

/// RK4 where the substep is halved until halving it again changes the final
/// amplitudes by less than rtol·|c| + atol. Returns the finer trajectory.
/// Throws StepUnderflow when the substep would drop below 1e-12 of the window,
/// or when halving stops reducing the change at round-off level (the
/// tolerance cannot be met at any step).
inline Trajectory evolve_from(const SystemParams& params, const FieldModel& field, const TimeGrid& grid,
                              TwoLevelState c0, Frame frame, IntegratorTolerance tol = {})
{
    if (!(tol.rtol > 0.0 && tol.atol > 0.0))
        throw ValidationError("integrator", "rtol and atol must be > 0");
    const double min_step = 1e-12 * (grid.back() - grid.t0);
    std::size_t substeps = 1;
    double last_change = HUGE_VAL;
    Trajectory coarse = evolve_fixed(params, field, grid, c0, frame, substeps);
    for (;;) {
        substeps *= 2;
        if (grid.step / static_cast<double>(substeps) < min_step)
            throw StepUnderflow("RK4 substep fell below 1e-12 of the integration window");
        Trajectory fine = evolve_fixed(params, field, grid, c0, frame, substeps);
        const TwoLevelState a = coarse.final_state();
        const TwoLevelState b = fine.final_state();
        const double change = std::max(std::abs(a.g - b.g), std::abs(a.e - b.e));
        const double scale = std::max(std::abs(b.g), std::abs(b.e));
        if (change < tol.rtol * scale + tol.atol) return fine;
        if (change < 1e-8 * scale && change >= 0.5 * last_change)
            throw StepUnderflow("RK4 substep halving stalled at round-off; tolerance unreachable");
        last_change = change;
        coarse = std::move(fine);
    }
}

inline Trajectory evolve(const SystemParams& params, const FieldModel& field, const TimeGrid& grid,
                         InitialBareState init, Frame frame, IntegratorTolerance tol = {})
{
    return evolve_from(params, field, grid, initial_state(init), frame, tol);
}

/// Resonant RWA populations (p_g, p_e) = (cos²(Ω₀t/2), sin²(Ω₀t/2)).
inline std::pair<double, double> rabi_oracle(double omega0, double t)
{
    if (!(omega0 > 0.0)) throw ValidationError("omega0", "must be > 0");
    const double s = std::sin(0.5 * omega0 * t);
    const double p_e = s * s;
    return {1.0 - p_e, p_e};
}

/// Asymptotic Landau–Zener diabatic survival probability exp(−2πV²/|α|).
inline double lz_oracle(double coupling, double sweep_rate)
{
    if (sweep_rate == 0.0) throw ValidationError("sweep_rate", "must be nonzero");
    return std::exp(-2.0 * std::numbers::pi * coupling * coupling / std::abs(sweep_rate));
}

/// Integrated Landau–Zener sweep in the rotating frame: constant coupling V
/// (Ω₀ = 2V), resonance at t = 0, linear chirp with gap rate α, window
/// [−half_window, half_window]. Starts in the instantaneous eigenstate
/// connected to |g⟩ and returns the population left in that eigenstate's
/// branch at the end, which converges to the diabatic survival probability
/// much faster than the bare |c_g|² readout.
inline double landau_zener_survival(double coupling, double sweep_rate, double half_window,
                                    double grid_step = 0.05, IntegratorTolerance tol = {})
{
    SystemParams params{0.0, 1.0, 1.0, 0.0, 0.0};
    FieldModel field;
    field.carrier_omega = 1.0;
    field.envelope = envelope::Constant{2.0 * coupling};
    field.phase = Chirp{0.0, sweep_rate, 0.0};

    // Rotating-frame Hamiltonian [[0, −V], [−V, −αt]]; eigenvector for the
    // eigenvalue that tends to 0 far from resonance, i.e. mostly |g⟩.
    auto ground_like = [&](double t) {
        const double gap = -sweep_rate * t;
        const double lambda = 0.5 * (gap - std::copysign(std::hypot(gap, 2.0 * coupling), gap));
        const double x = coupling;
        const double y = -lambda;
        const double n = std::hypot(x, y);
        return TwoLevelState{x / n, y / n};
    };

    const TimeGrid grid = TimeGrid::covering(-half_window, half_window, grid_step);
    const Trajectory traj =
        evolve_from(params, field, grid, ground_like(grid.t0), Frame::Rotating, tol);
    const TwoLevelState end = ground_like(grid.back());
    const TwoLevelState c = traj.final_state();
    return std::norm(std::conj(end.g) * c.g + std::conj(end.e) * c.e);
}

}  // namespace nads
