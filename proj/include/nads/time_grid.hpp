#pragma once

#include <cmath>
#include <cstddef>

#include "nads/errors.hpp"

namespace nads {

/// Uniform time grid t_k = t0 + k*step, k = 0..size-1.
struct TimeGrid {
    double t0 = 0.0;
    double step = 1.0;
    std::size_t size = 2;

    double at(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * step; }
    double back() const noexcept { return at(size - 1); }

    /// Smallest uniform grid over [t_start, t_end] whose spacing does not
    /// exceed `max_step`. Both endpoints are grid points.
    static TimeGrid covering(double t_start, double t_end, double max_step)
    {
        if (!(std::isfinite(t_start) && std::isfinite(t_end)))
            throw ValidationError("grid", "bounds must be finite");
        if (!(t_end > t_start)) throw ValidationError("grid.t_end", "must be > grid.t_start");
        if (!(max_step > 0.0)) throw ValidationError("grid.step", "must be > 0");
        const double span = t_end - t_start;
        const double intervals = std::ceil(span / max_step - 1e-9);
        const auto n = static_cast<std::size_t>(intervals < 1.0 ? 1.0 : intervals);
        return TimeGrid{t_start, span / static_cast<double>(n), n + 1};
    }
};

}  // namespace nads
