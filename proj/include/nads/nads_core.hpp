#pragma once

// Instantaneous quantities of the nonadiabatic dressed states (NADS):
// nonadiabatic detuning and Rabi frequency, the Λ splittings, the complex
// mixing functions COS(θ/2), SIN(θ/2), and the dressed-state frequencies.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "nads/errors.hpp"
#include "nads/field_model.hpp"
#include "nads/time_grid.hpp"

namespace nads {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};

/// Relative tolerance below which two square-root candidates count as equidistant.
inline constexpr double kBranchTolerance = 1e-14;
/// |Ω̃′| below which the Λ̃′ and mixing quotients are rejected.
inline constexpr double kDegenerateRabi = 1e-12;

struct NadsSnapshot {
    double t = 0.0;
    double omega = 0.0;  // Ω(t)
    double delta = 0.0;  // Δω
    cplx delta_tilde;
    cplx d_delta_tilde;
    cplx omega_tilde;
    cplx d_omega_tilde;
    cplx lambda1;
    cplx lambda2;
    cplx lambda_t1;
    cplx lambda_t2;
    cplx cos_half;
    cplx sin_half;
    cplx omega_G;
    cplx omega_E;
};

/// Which root a branch-continuous square root picked at one grid point.
/// `flipped` is true when the returned value is the negative of the
/// (sign-adjusted) principal root. `margin` is the ratio of the distance to
/// the rejected root over the distance to the chosen one (inf without a
/// previous sample); values near 1 mean the choice was close.
struct BranchChoice {
    bool flipped = false;
    double margin = 0.0;
};

struct BranchDecision {
    std::size_t index = 0;
    BranchChoice omega_tilde;
    BranchChoice cos_half;
    BranchChoice sin_half;
};

struct SnapshotSeries {
    SystemParams params;
    FieldModel field;
    TimeGrid grid;
    std::vector<NadsSnapshot> snapshots;
    std::vector<BranchDecision> branch_log;

    std::size_t size() const noexcept { return snapshots.size(); }
    const NadsSnapshot& operator[](std::size_t k) const { return snapshots[k]; }
};

struct Lambdas {
    cplx lambda1;
    cplx lambda2;
    cplx lambda_t1;
    cplx lambda_t2;
};

/// sgn(Δω) with sgn(0) = +1.
inline int sign_of(double delta) noexcept { return delta >= 0.0 ? 1 : -1; }

inline double detuning(const SystemParams& params, const FieldModel& field) noexcept
{
    return params.omega_e - params.omega_g - field.carrier_omega;
}

namespace detail {

/// Chooses between `root` and `-root` so the result stays closest to `prev`.
inline cplx continue_root(cplx root, const std::optional<cplx>& prev, BranchChoice& choice,
                          const char* what)
{
    choice = BranchChoice{false, HUGE_VAL};
    if (!prev || *prev == cplx{} || root == cplx{}) return root;
    const double keep = std::abs(root - *prev);
    const double flip = std::abs(root + *prev);
    if (std::abs(keep - flip) <= kBranchTolerance * std::max(keep, flip)) {
        throw BranchAmbiguity(std::string("both roots of ") + what +
                              " are equidistant from the previous sample");
    }
    if (flip < keep) {
        choice = BranchChoice{true, keep / flip};
        return -root;
    }
    choice.margin = flip / keep;
    return root;
}

}  // namespace detail

/// Δω̃′ = Δω − i(γ_g+γ_e)/2 − (∂ₜφ − iΩ⁻¹∂ₜΩ) and its analytic time derivative.
inline std::pair<cplx, cplx> nonadiabatic_detuning(const SystemParams& params, double delta,
                                                   const EnvelopeSample& env,
                                                   const PhaseSample& phase)
{
    const cplx delta_tilde{delta - phase.dphi, env.log_deriv - 0.5 * params.gamma_sum()};
    const cplx d_delta_tilde{-phase.d2phi, env.dlog_deriv};
    return {delta_tilde, d_delta_tilde};
}

/// Ω̃′ = sgn(Δω)·√(Ω² + Δω̃′² − 2i∂ₜΔω̃′).
/// Principal branch without `prev`; otherwise the root nearest `prev`.
inline cplx nonadiabatic_rabi(double omega, cplx delta_tilde, cplx d_delta_tilde, int sign_delta,
                              const std::optional<cplx>& prev = std::nullopt,
                              BranchChoice* choice = nullptr)
{
    const cplx radicand = omega * omega + delta_tilde * delta_tilde - 2.0 * I * d_delta_tilde;
    const cplx root = static_cast<double>(sign_delta) * std::sqrt(radicand);
    BranchChoice local;
    return detail::continue_root(root, prev, choice ? *choice : local, "the nonadiabatic Rabi frequency");
}

inline Lambdas lambdas(cplx delta_tilde, cplx omega_tilde, cplx d_omega_tilde)
{
    if (std::abs(omega_tilde) < kDegenerateRabi)
        throw DegenerateRabi("nonadiabatic Rabi frequency is (nearly) zero");
    Lambdas l;
    l.lambda1 = 0.5 * (delta_tilde + omega_tilde);
    l.lambda2 = 0.5 * (delta_tilde - omega_tilde);
    const cplx shift = I * d_omega_tilde / (2.0 * omega_tilde);
    l.lambda_t1 = l.lambda1 - shift;
    l.lambda_t2 = l.lambda2 - shift;
    return l;
}

struct MixingChoice {
    BranchChoice cos_half;
    BranchChoice sin_half;
};

/// COS(θ/2) = √(Λ̃′₁/Ω̃′), SIN(θ/2) = sgn(Δω)·√(−Λ̃′₂/Ω̃′), each branch-continued.
inline std::pair<cplx, cplx> mixing_functions(cplx lambda_t1, cplx lambda_t2, cplx omega_tilde,
                                              int sign_delta,
                                              const std::optional<std::pair<cplx, cplx>>& prev = std::nullopt,
                                              MixingChoice* choice = nullptr)
{
    if (std::abs(omega_tilde) < kDegenerateRabi)
        throw DegenerateRabi("nonadiabatic Rabi frequency is (nearly) zero");
    MixingChoice local;
    MixingChoice& out = choice ? *choice : local;
    const cplx c = std::sqrt(lambda_t1 / omega_tilde);
    const cplx s = static_cast<double>(sign_delta) * std::sqrt(-lambda_t2 / omega_tilde);
    std::optional<cplx> prev_c, prev_s;
    if (prev) {
        prev_c = prev->first;
        prev_s = prev->second;
    }
    return {detail::continue_root(c, prev_c, out.cos_half, "COS(theta/2)"),
            detail::continue_root(s, prev_s, out.sin_half, "SIN(theta/2)")};
}

/// Ground and excited NADS frequencies:
/// ω̃′_G = ω_g + Λ₂, ω̃′_E = ω_e − Λ₂ − i(γ_g+γ_e)/2 − (∂ₜφ − iΩ⁻¹∂ₜΩ).
inline std::pair<cplx, cplx> nads_frequencies(const SystemParams& params, cplx lambda2,
                                              const EnvelopeSample& env, const PhaseSample& phase)
{
    const cplx omega_G = params.omega_g + lambda2;
    const cplx omega_E = params.omega_e - lambda2 +
                         cplx{-phase.dphi, env.log_deriv - 0.5 * params.gamma_sum()};
    return {omega_G, omega_E};
}

/// First derivative of uniformly sampled data: second-order central
/// differences inside, second-order one-sided at the ends (first-order
/// when only two samples exist).
inline std::vector<cplx> grid_derivative(const std::vector<cplx>& f, double h)
{
    const std::size_t n = f.size();
    std::vector<cplx> df(n);
    if (n < 2) return df;
    if (n == 2) {
        df[0] = df[1] = (f[1] - f[0]) / h;
        return df;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) df[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    // (−3f₀ + 4f₁ − f₂)/2h written in differences so constant data gives exactly 0
    df[0] = (3.0 * (f[1] - f[0]) - (f[2] - f[1])) / (2.0 * h);
    df[n - 1] = (3.0 * (f[n - 1] - f[n - 2]) - (f[n - 2] - f[n - 3])) / (2.0 * h);
    return df;
}

/// Evaluates every NADS quantity on `grid`. Errors carry the grid index.
inline SnapshotSeries snapshot_series(const SystemParams& params, const FieldModel& field,
                                      const TimeGrid& grid)
{
    if (grid.size < 2) throw ValidationError("grid", "needs at least 2 points");
    SnapshotSeries series{params, field, grid, {}, {}};
    auto& snaps = series.snapshots;
    snaps.resize(grid.size);
    series.branch_log.resize(grid.size);

    const double delta = detuning(params, field);
    const int sign = sign_of(delta);
    std::vector<EnvelopeSample> envs(grid.size);
    std::vector<PhaseSample> phases(grid.size);
    std::vector<cplx> omega_tilde(grid.size);

    std::size_t k = 0;
    try {
        for (k = 0; k < grid.size; ++k) {
            const double t = grid.at(k);
            envs[k] = rabi_at(params, field, t);
            phases[k] = phase_at(field, t);
            auto& s = snaps[k];
            s.t = t;
            s.omega = envs[k].omega;
            s.delta = delta;
            std::tie(s.delta_tilde, s.d_delta_tilde) =
                nonadiabatic_detuning(params, delta, envs[k], phases[k]);
            std::optional<cplx> prev;
            if (k > 0) prev = omega_tilde[k - 1];
            series.branch_log[k].index = k;
            omega_tilde[k] = nonadiabatic_rabi(s.omega, s.delta_tilde, s.d_delta_tilde, sign, prev,
                                               &series.branch_log[k].omega_tilde);
            s.omega_tilde = omega_tilde[k];
        }

        const auto d_omega_tilde = grid_derivative(omega_tilde, grid.step);
        for (k = 0; k < grid.size; ++k) {
            auto& s = snaps[k];
            s.d_omega_tilde = d_omega_tilde[k];
            const Lambdas l = lambdas(s.delta_tilde, s.omega_tilde, s.d_omega_tilde);
            s.lambda1 = l.lambda1;
            s.lambda2 = l.lambda2;
            s.lambda_t1 = l.lambda_t1;
            s.lambda_t2 = l.lambda_t2;
            std::optional<std::pair<cplx, cplx>> prev;
            if (k > 0) prev.emplace(snaps[k - 1].cos_half, snaps[k - 1].sin_half);
            MixingChoice mc;
            std::tie(s.cos_half, s.sin_half) =
                mixing_functions(s.lambda_t1, s.lambda_t2, s.omega_tilde, sign, prev, &mc);
            series.branch_log[k].cos_half = mc.cos_half;
            series.branch_log[k].sin_half = mc.sin_half;
            std::tie(s.omega_G, s.omega_E) = nads_frequencies(params, s.lambda2, envs[k], phases[k]);
        }
    } catch (NumericalError& e) {
        e.set_grid_index(k);
        throw;
    }
    return series;
}

}  // namespace nads
