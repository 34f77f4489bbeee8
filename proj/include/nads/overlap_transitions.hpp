#pragma once

// Matrix elements between the nonadiabatic dressed states, the normalized
// transition probability, and the bare-basis component reconstruction.
//
// All inner products are the plain Hermitian product on the bare basis.
// States are never orthogonalized.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "nads/errors.hpp"
#include "nads/field_model.hpp"
#include "nads/nads_core.hpp"

namespace nads {

struct OverlapSet {
    double t = 0.0;
    double gg = 0.0;  // ⟨G̃|G̃⟩
    double ee = 0.0;  // ⟨Ẽ|Ẽ⟩
    cplx eg;          // ⟨Ẽ|G̃⟩
    double p_ge = 0.0;
};

enum class InitialState { Ground, Excited };

/// Coefficients on |g⟩ and |e⟩.
struct BareVector {
    cplx g;
    cplx e;
};

inline cplx inner(const BareVector& bra, const BareVector& ket) noexcept
{
    return std::conj(bra.g) * ket.g + std::conj(bra.e) * ket.e;
}

struct ReconstructedAmplitudes {
    double t = 0.0;
    InitialState init = InitialState::Ground;
    /// c_e/c_g for a ground start, c_g/c_e for an excited start.
    cplx ratio;
    BareVector ground_real;     // |G̃′⟩_r
    BareVector ground_virtual;  // |G̃′⟩_v
    BareVector excited_real;    // |Ẽ′⟩_r
    BareVector excited_virtual; // |Ẽ′⟩_v
    BareVector ground;          // |G̃′⟩ = COS|G̃′⟩_r + SIN|G̃′⟩_v
    BareVector excited;         // |Ẽ′⟩ = COS|Ẽ′⟩_r − SIN|Ẽ′⟩_v
};

/// s·c* − s*·c, i.e. 2i·Im(s·c*).
inline cplx mixing_bracket(cplx sin_half, cplx cos_half) noexcept
{
    return sin_half * std::conj(cos_half) - std::conj(sin_half) * cos_half;
}

/// Pointwise transition probability |s c* − s* c|² / (|s|² + |c|²)².
inline double transition_probability(cplx sin_half, cplx cos_half) noexcept
{
    const double norm = std::norm(sin_half) + std::norm(cos_half);
    return std::norm(mixing_bracket(sin_half, cos_half)) / (norm * norm);
}

inline double transition_probability(const NadsSnapshot& s) noexcept
{
    return transition_probability(s.sin_half, s.cos_half);
}

/// Reverse-direction probability P(Ẽ→G̃), built from the mirrored bracket s*·c − s·c*.
inline double transition_probability_reverse(cplx sin_half, cplx cos_half) noexcept
{
    const double norm = std::norm(sin_half) + std::norm(cos_half);
    const cplx bracket = std::conj(sin_half) * cos_half - sin_half * std::conj(cos_half);
    return std::norm(bracket) / (norm * norm);
}

inline double transition_probability_reverse(const NadsSnapshot& s) noexcept
{
    return transition_probability_reverse(s.sin_half, s.cos_half);
}

/// Running trapezoid integral from the first sample: out[0] = 0.
template <class T>
std::vector<T> cumulative_trapezoid(const std::vector<T>& f, double h)
{
    std::vector<T> out(f.size(), T{});
    for (std::size_t k = 1; k < f.size(); ++k) out[k] = out[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
    return out;
}

/// Matrix elements over a snapshot series. The time integrals run from the
/// first grid point and are computed once on construction.
/// The series must outlive this object.
class NadsOverlaps {
public:
    explicit NadsOverlaps(const SnapshotSeries& series) : series_(&series)
    {
        const std::size_t n = series.size();
        const double h = series.grid.step;
        const double carrier = series.field.carrier_omega;
        std::vector<double> im_G(n), im_E(n), log_deriv(n), im_ot(n), re_ot(n);
        std::vector<cplx> w_G(n), w_E(n), eg_rate(n), ge_rate(n);
        for (std::size_t k = 0; k < n; ++k) {
            const NadsSnapshot& s = series[k];
            im_G[k] = s.omega_G.imag();
            im_E[k] = s.omega_E.imag();
            w_G[k] = s.omega_G;
            w_E[k] = s.omega_E;
            eg_rate[k] = std::conj(s.omega_E) - s.omega_G - carrier;
            ge_rate[k] = s.omega_E - std::conj(s.omega_G) - carrier;
            log_deriv[k] = envelope_sample(series.params, series.field, s.t).log_deriv;
            im_ot[k] = s.omega_tilde.imag();
            re_ot[k] = s.omega_tilde.real();
        }
        int_im_G_ = cumulative_trapezoid(im_G, h);
        int_im_E_ = cumulative_trapezoid(im_E, h);
        int_G_ = cumulative_trapezoid(w_G, h);
        int_E_ = cumulative_trapezoid(w_E, h);
        int_eg_ = cumulative_trapezoid(eg_rate, h);
        int_ge_ = cumulative_trapezoid(ge_rate, h);
        int_log_deriv_ = cumulative_trapezoid(log_deriv, h);
        int_im_ot_ = cumulative_trapezoid(im_ot, h);
        int_re_ot_ = cumulative_trapezoid(re_ot, h);
    }

    const SnapshotSeries& series() const noexcept { return *series_; }
    std::size_t size() const noexcept { return series_->size(); }

    /// ⟨G̃|G̃⟩ = (|SIN|² + |COS|²)·exp(2∫Im ω̃′_G dt′)
    double gg(std::size_t k) const
    {
        return weight(k) * std::exp(2.0 * int_im_G_.at(k));
    }

    /// ⟨Ẽ|Ẽ⟩ = (|SIN|² + |COS|²)·exp(2∫Im ω̃′_E dt′)
    double ee(std::size_t k) const
    {
        return weight(k) * std::exp(2.0 * int_im_E_.at(k));
    }

    /// ⟨Ẽ|G̃⟩ = (s c* − s* c)·exp{i∫(ω̃′_E* − ω̃′_G − ω)dt′}
    cplx eg(std::size_t k) const
    {
        const NadsSnapshot& s = (*series_)[k];
        return mixing_bracket(s.sin_half, s.cos_half) * std::exp(I * int_eg_.at(k));
    }

    /// ⟨G̃|Ẽ⟩ from the mirrored formula (s* c − s c*)·exp{−i∫(ω̃′_E − ω̃′_G* − ω)dt′}.
    cplx ge(std::size_t k) const
    {
        const NadsSnapshot& s = (*series_)[k];
        const cplx bracket = std::conj(s.sin_half) * s.cos_half - s.sin_half * std::conj(s.cos_half);
        return bracket * std::exp(-I * int_ge_.at(k));
    }

    // Expanded forms in terms of the damping sum, Ω⁻¹∂ₜΩ and Ω̃′.

    double gg_expanded(std::size_t k) const
    {
        return weight(k) *
               std::exp(-0.5 * gamma_sum() * elapsed(k) + int_log_deriv_.at(k) - int_im_ot_.at(k));
    }

    double ee_expanded(std::size_t k) const
    {
        return weight(k) *
               std::exp(-0.5 * gamma_sum() * elapsed(k) + int_log_deriv_.at(k) + int_im_ot_.at(k));
    }

    cplx eg_expanded(std::size_t k) const
    {
        const NadsSnapshot& s = (*series_)[k];
        const cplx exponent{-0.5 * gamma_sum() * elapsed(k) + int_log_deriv_.at(k), int_re_ot_.at(k)};
        return mixing_bracket(s.sin_half, s.cos_half) * std::exp(exponent);
    }

    /// |⟨Ẽ|G̃⟩|² / (⟨G̃|G̃⟩⟨Ẽ|Ẽ⟩) with all exponential factors kept.
    double transition_probability_via_overlaps(std::size_t k) const
    {
        return std::norm(eg(k)) / (gg(k) * ee(k));
    }

    /// |⟨G̃|Ẽ⟩|² / (⟨G̃|G̃⟩⟨Ẽ|Ẽ⟩), the reverse transition.
    double reverse_probability_via_overlaps(std::size_t k) const
    {
        return std::norm(ge(k)) / (gg(k) * ee(k));
    }

    OverlapSet overlap_set(std::size_t k) const
    {
        return {(*series_)[k].t, gg(k), ee(k), eg(k), transition_probability((*series_)[k])};
    }

    /// Bare-basis components of both NADS at grid point k, and the amplitude
    /// ratio of the dressed state connected to the initial bare state.
    ReconstructedAmplitudes reconstruct_bare_amplitudes(std::size_t k, InitialState init) const
    {
        const NadsSnapshot& s = (*series_)[k];
        const double phi = phase_at(series_->field, s.t).phi;
        const double carrier_phase = series_->field.carrier_omega * elapsed(k);
        const cplx int_G = int_G_.at(k);
        const cplx int_E = int_E_.at(k);

        ReconstructedAmplitudes r;
        r.t = s.t;
        r.init = init;
        r.ground_real = {std::exp(-I * int_G), 0.0};
        r.excited_real = {0.0, std::exp(-I * (int_E + phi))};
        r.ground_virtual = {0.0, std::exp(-I * (int_G + carrier_phase + phi))};
        r.excited_virtual = {std::exp(-I * (int_E - carrier_phase)), 0.0};
        r.ground = {s.cos_half * r.ground_real.g + s.sin_half * r.ground_virtual.g,
                    s.cos_half * r.ground_real.e + s.sin_half * r.ground_virtual.e};
        r.excited = {s.cos_half * r.excited_real.g - s.sin_half * r.excited_virtual.g,
                     s.cos_half * r.excited_real.e - s.sin_half * r.excited_virtual.e};

        const cplx num = init == InitialState::Ground ? r.ground.e : r.excited.g;
        const cplx den = init == InitialState::Ground ? r.ground.g : r.excited.e;
        if (!(std::abs(den) >= 1e-14 * std::abs(num))) {
            RatioUndefined err("amplitude ratio overflows: denominator vanishes");
            err.set_grid_index(k);
            throw err;
        }
        r.ratio = num / den;
        return r;
    }

private:
    double weight(std::size_t k) const
    {
        const NadsSnapshot& s = (*series_)[k];
        return std::norm(s.sin_half) + std::norm(s.cos_half);
    }
    double gamma_sum() const noexcept { return series_->params.gamma_sum(); }
    double elapsed(std::size_t k) const { return (*series_)[k].t - series_->grid.t0; }

    const SnapshotSeries* series_;
    std::vector<double> int_im_G_, int_im_E_, int_log_deriv_, int_im_ot_, int_re_ot_;
    std::vector<cplx> int_G_, int_E_, int_eg_, int_ge_;
};

}  // namespace nads
