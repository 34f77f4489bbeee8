#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nads/field_model.hpp"

using namespace nads;

namespace {

FieldModel with_envelope(Envelope env, double carrier = 1.0, Chirp chirp = {})
{
    FieldModel f;
    f.carrier_omega = carrier;
    f.envelope = env;
    f.phase = chirp;
    return f;
}

const SystemParams kUnit{};

}  // namespace

TEST(RabiAt, ConstantEnvelopeHasZeroDerivatives)
{
    const auto f = with_envelope(envelope::Constant{0.5});
    for (double t : {-100.0, 0.0, 3.7, 1e4}) {
        const auto s = rabi_at(kUnit, f, t);
        EXPECT_EQ(s.omega, 0.5);
        EXPECT_EQ(s.log_deriv, 0.0);
        EXPECT_EQ(s.dlog_deriv, 0.0);
    }
}

TEST(RabiAt, GaussianClosedForm)
{
    const auto f = with_envelope(envelope::Gaussian{1.0, 0.0, 10.0});
    const auto s = rabi_at(kUnit, f, 5.0);
    EXPECT_DOUBLE_EQ(s.omega, std::exp(-0.25));
    EXPECT_NEAR(s.omega, 0.7788007830714049, 1e-15);
    EXPECT_DOUBLE_EQ(s.log_deriv, -0.1);
    EXPECT_DOUBLE_EQ(s.dlog_deriv, -0.02);
}

TEST(RabiAt, SechAtCenterMatchesFiniteDifferences)
{
    const auto f = with_envelope(envelope::Sech{1.0, 0.0, 2.0});
    const auto s = rabi_at(kUnit, f, 0.0);
    EXPECT_DOUBLE_EQ(s.omega, 1.0);
    EXPECT_EQ(s.log_deriv, 0.0);
    EXPECT_DOUBLE_EQ(s.dlog_deriv, -0.25);

    // Oracle: central differences of ln Ω with h = 1e-4.
    const double h = 1e-4;
    auto log_omega = [&](double t) { return std::log(envelope_sample(kUnit, f, t).omega); };
    const double fd1 = (log_omega(h) - log_omega(-h)) / (2 * h);
    const double fd2 = (log_omega(h) - 2 * log_omega(0.0) + log_omega(-h)) / (h * h);
    EXPECT_NEAR(fd1, s.log_deriv, 1e-10);
    EXPECT_NEAR(fd2, s.dlog_deriv, 1e-6);
}

TEST(RabiAt, MuScalesRabiButNotLogDerivative)
{
    SystemParams p;
    p.mu = 3.0;
    const auto f = with_envelope(envelope::Gaussian{1.0, 0.0, 10.0});
    const auto s = rabi_at(p, f, 5.0);
    EXPECT_DOUBLE_EQ(s.omega, 3.0 * std::exp(-0.25));
    EXPECT_DOUBLE_EQ(s.log_deriv, -0.1);
}

TEST(RabiAt, UnderflowIsAnError)
{
    auto f = with_envelope(envelope::Gaussian{1.0, 0.0, 1.0});
    EXPECT_NO_THROW(rabi_at(kUnit, f, 8.0));  // e^-64 ≈ 1.6e-28
    EXPECT_THROW(rabi_at(kUnit, f, 9.0), EnvelopeUnderflow);
    f.omega_floor = 1e-10;
    EXPECT_THROW(rabi_at(kUnit, f, 5.0), EnvelopeUnderflow);
    EXPECT_THROW(rabi_at(kUnit, with_envelope(envelope::Off{}), 0.0), EnvelopeUnderflow);
}

TEST(PhaseAt, Examples)
{
    {
        const auto p = phase_at(with_envelope(envelope::Constant{}, 1.0, {0.0, 0.0, 0.0}), 7.0);
        EXPECT_EQ(p.phi, 0.0);
        EXPECT_EQ(p.dphi, 0.0);
        EXPECT_EQ(p.d2phi, 0.0);
    }
    {
        const auto p = phase_at(with_envelope(envelope::Constant{}, 1.0, {1.0, 0.2, 0.0}), 3.0);
        EXPECT_DOUBLE_EQ(p.phi, 1.9);
        EXPECT_DOUBLE_EQ(p.dphi, 0.6);
        EXPECT_DOUBLE_EQ(p.d2phi, 0.2);
    }
    {
        const auto p = phase_at(with_envelope(envelope::Constant{}, 1.0, {0.0, -0.1, 2.0}), 2.0);
        EXPECT_EQ(p.phi, 0.0);
        EXPECT_EQ(p.dphi, 0.0);
        EXPECT_DOUBLE_EQ(p.d2phi, -0.1);
    }
}

TEST(FieldValue, Examples)
{
    const auto cw = with_envelope(envelope::Constant{0.4}, 5.0);
    EXPECT_DOUBLE_EQ(field_value(cw, kUnit, 0.0), -0.4);
    EXPECT_NEAR(field_value(cw, kUnit, std::numbers::pi / 10), 0.0, 1e-16);

    const auto g = with_envelope(envelope::Gaussian{1.0, 0.0, 10.0}, 2.0, {0.0, 0.2, 0.0});
    // mpmath: −exp(−1/4)·cos(12.5)
    EXPECT_NEAR(field_value(g, kUnit, 5.0), -0.77708608117157887246, 1e-14);
    // envelope × carrier decomposition
    const double carrier = std::cos(2.0 * 5.0 + phase_at(g, 5.0).phi);
    EXPECT_DOUBLE_EQ(field_value(g, kUnit, 5.0), -envelope_sample(kUnit, g, 5.0).omega * carrier);
}

TEST(FieldModelProperties, AnalyticDerivativesMatchFiniteDifferences)
{
    std::mt19937_64 rng(20241018);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const double tau = std::exp(std::log(0.5) + unit(rng) * std::log(2000.0));
        const double tc = (unit(rng) - 0.5) * 200.0;
        const double peak = 0.01 + 5.0 * unit(rng);
        const Envelope env = (i % 2 == 0) ? Envelope{envelope::Gaussian{peak, tc, tau}}
                                          : Envelope{envelope::Sech{peak, tc, tau}};
        const FieldModel f = with_envelope(env);
        const double t = tc + (unit(rng) - 0.5) * 12.0 * tau;
        const double h = 1e-5 * tau;

        const auto s = rabi_at(kUnit, f, t);
        const double fd_log = (envelope_sample(kUnit, f, t + h).omega - envelope_sample(kUnit, f, t - h).omega) /
                              (2 * h) / s.omega;
        const double fd_dlog =
            (envelope_sample(kUnit, f, t + h).log_deriv - envelope_sample(kUnit, f, t - h).log_deriv) / (2 * h);
        // Relative to the natural scales 1/τ and 1/τ² (the derivatives cross zero).
        EXPECT_LT(std::abs(fd_log - s.log_deriv), 1e-6 * std::max(std::abs(s.log_deriv), 1.0 / tau));
        EXPECT_LT(std::abs(fd_dlog - s.dlog_deriv),
                  1e-6 * std::max(std::abs(s.dlog_deriv), 1.0 / (tau * tau)));
        ++checked;
    }
    EXPECT_EQ(checked, 1000);
}

TEST(FieldModelProperties, PhaseDerivativesMatchFiniteDifferences)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Chirp c{unit(rng) * 3.0, unit(rng) * 0.1, unit(rng) * 50.0};
        const FieldModel f = with_envelope(envelope::Constant{1.0}, 1.0, c);
        const double t = unit(rng) * 100.0;
        const double h = 1e-3;
        const auto p = phase_at(f, t);
        const double fd1 = (phase_at(f, t + h).phi - phase_at(f, t - h).phi) / (2 * h);
        const double fd2 = (phase_at(f, t + h).dphi - phase_at(f, t - h).dphi) / (2 * h);
        const double scale1 = std::max(std::abs(p.dphi), std::abs(c.beta));
        EXPECT_LT(std::abs(fd1 - p.dphi), 1e-8 * scale1 + 1e-12);
        EXPECT_LT(std::abs(fd2 - p.d2phi), 1e-8 * std::abs(c.beta) + 1e-12);
    }
}

TEST(FieldModelProperties, PulsesAreEvenAboutCenter)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double tc = 0.0;  // exact mirror points need representable t_c ± s
        const double tau = 0.5 + 50.0 * unit(rng);
        const double s = unit(rng) * 5.0 * tau;
        for (const Envelope& env : {Envelope{envelope::Gaussian{1.3, tc, tau}},
                                    Envelope{envelope::Sech{1.3, tc, tau}}}) {
            const FieldModel f = with_envelope(env);
            EXPECT_EQ(rabi_at(kUnit, f, tc + s).omega, rabi_at(kUnit, f, tc - s).omega);
        }
    }
}

TEST(Validation, RejectsBadFieldsAndParams)
{
    EXPECT_THROW(validate(with_envelope(envelope::Gaussian{1.0, 0.0, -1.0})), ValidationError);
    EXPECT_THROW(validate(with_envelope(envelope::Constant{0.0})), ValidationError);
    EXPECT_NO_THROW(validate(with_envelope(envelope::Off{})));
    try {
        validate(with_envelope(envelope::Sech{1.0, 0.0, 0.0}));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "field.envelope.tau");
    }
    SystemParams p;
    p.gamma_e = -0.1;
    EXPECT_THROW(p.validate(), ValidationError);
    p = {};
    p.omega_e = p.omega_g;
    EXPECT_THROW(p.validate(), ValidationError);
}
