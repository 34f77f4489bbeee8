// Scans the chirp rate of a damped Gaussian pulse and prints, per rate, the
// peak dressed-state transition probability next to the final excited
// population from the integrator.
//
//   chirp_scan [beta_max] [count]

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "nads/nads_core.hpp"
#include "nads/overlap_transitions.hpp"
#include "nads/tdse_integrator.hpp"

int main(int argc, char** argv)
{
    const double beta_max = argc > 1 ? std::atof(argv[1]) : 0.02;
    const int count = argc > 2 ? std::atoi(argv[2]) : 9;
    if (count < 2 || !(beta_max > 0.0)) {
        std::fprintf(stderr, "usage: chirp_scan [beta_max > 0] [count >= 2]\n");
        return 1;
    }

    const nads::SystemParams system{0.0, 5.0, 1.0, 0.05, 0.15};
    nads::FieldModel field;
    field.carrier_omega = 4.5;
    field.envelope = nads::envelope::Gaussian{2.0, 0.0, 20.0};
    const nads::TimeGrid grid = nads::TimeGrid::covering(-60.0, 60.0, 0.05);

    std::printf("%12s %14s %14s %14s\n", "beta", "max P", "t at max P", "final |c_e|^2");
    for (int i = 0; i < count; ++i) {
        field.phase.beta = beta_max * i / (count - 1);
        try {
            const auto series = nads::snapshot_series(system, field, grid);
            std::size_t peak = 0;
            for (std::size_t k = 1; k < series.size(); ++k)
                if (nads::transition_probability(series[k]) > nads::transition_probability(series[peak])) peak = k;
            const auto traj =
                nads::evolve(system, field, grid, nads::InitialBareState::Ground, nads::Frame::Rotating);
            std::printf("%12.5g %14.6e %14.4f %14.6e\n", field.phase.beta,
                        nads::transition_probability(series[peak]), series[peak].t,
                        std::norm(traj.final_state().e));
        } catch (const nads::Error& e) {
            std::printf("%12.5g  failed: %s\n", field.phase.beta, e.what());
        }
    }
    return 0;
}
