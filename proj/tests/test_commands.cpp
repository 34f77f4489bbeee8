#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "nads/commands.hpp"
#include "nads/validation.hpp"

using namespace nads;

namespace {

Scenario shipped(const std::string& name)
{
    return load_scenario(std::filesystem::path(NADS_SCENARIO_DIR) / (name + ".json"));
}

std::size_t row_at(const Table& t, double time)
{
    const std::size_t col = t.column("t");
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        if (std::abs(std::get<double>(t.rows[r][col]) - time) < 1e-9) return r;
    throw std::runtime_error("no row at t=" + std::to_string(time));
}

std::string csv(const Table& t)
{
    std::ostringstream out;
    write_csv(out, t);
    return out.str();
}

}  // namespace

TEST(Snapshot, ColumnsAndRows)
{
    const Scenario s = shipped("static_cw");
    const Table t = cmd_snapshot(s);
    EXPECT_EQ(t.columns.size(), 20u);
    EXPECT_EQ(t.columns.front(), "t");
    EXPECT_EQ(t.columns.back(), "P");
    EXPECT_EQ(t.rows.size(), s.time_grid().size);
    for (const auto& row : t.rows) EXPECT_EQ(row.size(), t.columns.size());
}

TEST(Snapshot, StaticAdiabaticScenarioHasZeroP)
{
    const Table t = cmd_snapshot(shipped("static_cw"));
    for (std::size_t r = 0; r < t.rows.size(); ++r) EXPECT_LT(t.number(r, "P"), 1e-12);
}

TEST(Snapshot, GaussianMatchesHighPrecisionOracle)
{
    // tests/oracles/nads_oracle.py, 50 digits, branch-continued.
    const std::pair<double, double> spots[] = {
        {-30.0, 0.00080474586544236487976}, {-10.0, 0.0031363335768011189165}, {0.0, 0.0022137443285869458976},
        {10.0, 0.0035896825988144176874},   {30.0, 0.19600773512936475708},
    };
    const Table t = cmd_snapshot(shipped("gaussian_chirped_damped"));
    for (const auto& [time, p] : spots) EXPECT_NEAR(t.number(row_at(t, time), "P"), p, 2e-4) << time;

    const std::size_t c = row_at(t, 0.0);
    EXPECT_NEAR(t.number(c, "Re_omega_tilde"), 2.0567883257091721276, 1e-6);
    EXPECT_NEAR(t.number(c, "Im_omega_tilde"), -0.019447796110087393196, 1e-6);
    EXPECT_NEAR(t.number(c, "gg"), 0.2942519908684480437, 5e-6);
}

TEST(Snapshot, TwoPointGrid)
{
    Scenario s = shipped("static_damped");
    s.grid = {0.0, 1.0, 1.0};
    validate(s);
    const Table t = cmd_snapshot(s);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.number(1, "t"), 1.0);
}

TEST(Snapshot, FieldOffIsANumericalError)
{
    EXPECT_THROW(cmd_snapshot(shipped("decay")), EnvelopeUnderflow);
}

TEST(Evolve, PiPulseInvertsPopulation)
{
    const Table t = cmd_evolve(shipped("pi_pulse"), false);
    const std::size_t last = t.rows.size() - 1;
    const double pe = std::pow(t.number(last, "Re_c_e"), 2) + std::pow(t.number(last, "Im_c_e"), 2);
    EXPECT_NEAR(pe, 1.0, 1e-8);
}

TEST(Evolve, DecayNormMatchesClosedForm)
{
    const Scenario s = shipped("decay");
    const Table t = cmd_evolve(s, false);
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        EXPECT_NEAR(t.number(r, "norm"), std::exp(-s.system.gamma_g * t.number(r, "t")), 1e-8);
}

TEST(Evolve, CompareModeOnSlowGaussian)
{
    const Scenario s = shipped("slow_gaussian");
    const Table t = cmd_evolve(s, true);
    const std::size_t c = row_at(t, 0.0);
    EXPECT_LT(t.number(c, "ratio_rel_diff"), 0.05);
    EXPECT_NEAR(t.number(c, "abs_ratio_nads") / t.number(c, "abs_ratio_tdse"), 1.0, 0.05);
    EXPECT_THROW(t.column("nope"), ValidationError);
    EXPECT_EQ(cmd_evolve(s, false).columns.size(), 6u);
}

TEST(Sweep, ChirpFamilyMaxPGrowsWithChirpRate)
{
    SweepSpec spec;
    spec.base = shipped("chirped_cw");
    spec.axes = {parse_axis("field.phase.beta:-0.05:0.05:11")};
    spec.reduce = Reducer::MaxP;
    const Table t = cmd_sweep(spec, 3);
    ASSERT_EQ(t.rows.size(), 11u);
    const std::size_t zero = 5;
    EXPECT_EQ(t.number(zero, "field.phase.beta"), 0.0);
    EXPECT_LT(t.number(zero, "maxP"), 1e-12);
    for (std::size_t i = 1; i <= 5; ++i) {
        EXPECT_GE(t.number(zero + i, "maxP"), t.number(zero + i - 1, "maxP"));
        EXPECT_GE(t.number(zero - i, "maxP"), t.number(zero - i + 1, "maxP"));
    }
    // Each point equals a direct evaluation of the pointwise probability.
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        Scenario s = spec.base;
        s.field.phase.beta = t.number(r, "field.phase.beta");
        const auto series = snapshot_series(s.system, s.field, s.time_grid());
        double m = 0.0;
        for (const auto& n : series.snapshots) m = std::max(m, transition_probability(n));
        EXPECT_EQ(t.number(r, "maxP"), m);
    }
}

TEST(Sweep, TwoAxesAreAxisMajor)
{
    SweepSpec spec;
    spec.base = shipped("gaussian_chirped_damped");
    spec.base.grid.step_policy = StepPolicy::Warn;
    spec.axes = {parse_axis("field.envelope.tau:10:40:5"), parse_axis("system.gamma_e:0:0.4:5")};
    spec.reduce = Reducer::MaxP;
    const Table t = cmd_sweep(spec, 4);
    ASSERT_EQ(t.rows.size(), 25u);
    for (std::size_t r = 0; r < 25; ++r) {
        EXPECT_EQ(t.number(r, "field.envelope.tau"), spec.axes[0].value(r / 5));
        EXPECT_EQ(t.number(r, "system.gamma_e"), spec.axes[1].value(r % 5));
        EXPECT_EQ(std::get<std::string>(t.rows[r][t.column("error")]), "");
    }
}

TEST(Sweep, ResultsDoNotDependOnWorkerCount)
{
    SweepSpec spec;
    spec.base = shipped("sech_pulse");
    spec.axes = {parse_axis("field.envelope.omega0:0.2:2:4"), parse_axis("system.gamma_e:0.01:0.3:3:log")};
    spec.reduce = Reducer::FinalPe;
    const std::string sequential = csv(cmd_sweep(spec, 1));
    EXPECT_EQ(csv(cmd_sweep(spec, 2)), sequential);
    EXPECT_EQ(csv(cmd_sweep(spec, 7)), sequential);
    EXPECT_EQ(csv(cmd_sweep(spec, 100)), sequential);
}

TEST(Sweep, AxisTypoFailsBeforeAnyComputation)
{
    SweepSpec spec;
    spec.base = shipped("static_cw");
    spec.axes = {parse_axis("system.gamma_ee:0:1:3")};
    try {
        cmd_sweep(spec, 1);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "system.gamma_ee");
        EXPECT_NE(std::string(e.what()).find("system.gamma_e?"), std::string::npos) << e.what();
    }
    // τ only exists for pulsed envelopes.
    spec.axes = {parse_axis("field.envelope.tau:1:2:3")};
    EXPECT_THROW(validate(spec), ValidationError);
    spec.axes = {parse_axis("system.gamma_e:0:1:1")};
    EXPECT_THROW(validate(spec), ValidationError);
    spec.axes = {parse_axis("system.gamma_e:0:1:3:log")};
    EXPECT_THROW(validate(spec), ValidationError);
}

TEST(Sweep, FailedPointsAreRecordedAndTheRunContinues)
{
    SweepSpec spec;
    spec.base = shipped("static_cw");
    spec.axes = {parse_axis("system.gamma_e:-0.1:0.1:3")};
    spec.reduce = Reducer::FinalP;
    const Table t = cmd_sweep(spec, 2);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_TRUE(std::isnan(t.number(0, "finalP")));
    EXPECT_NE(std::get<std::string>(t.rows[0][t.column("error")]).find("system.gamma_e"), std::string::npos);
    EXPECT_FALSE(std::isnan(t.number(1, "finalP")));
    EXPECT_FALSE(std::isnan(t.number(2, "finalP")));
    EXPECT_NE(csv(t).find(",nan,system.gamma_e: must be >= 0\n"), std::string::npos) << csv(t);
}

TEST(Sweep, AxisParsing)
{
    const SweepAxis a = parse_axis("system.mu:1:100:3:log");
    EXPECT_TRUE(a.log);
    EXPECT_EQ(a.value(0), 1.0);
    EXPECT_NEAR(a.value(1), 10.0, 1e-13);
    EXPECT_EQ(a.value(2), 100.0);
    const SweepAxis b = parse_axis("system.mu:0:0.05:6");
    EXPECT_EQ(b.value(1), 0.01);
    EXPECT_EQ(b.value(5), 0.05);
    EXPECT_THROW(parse_axis("system.mu:0:1"), ValidationError);
    EXPECT_THROW(parse_axis("system.mu:0:x:3"), ValidationError);
    EXPECT_THROW(parse_axis("system.mu:0:1:2.5"), ValidationError);
    EXPECT_THROW(parse_axis("system.mu:0:1:3:cubic"), ValidationError);
    EXPECT_THROW(parse_reducer("maxp"), ValidationError);
    EXPECT_EQ(parse_reducer("finalPe"), Reducer::FinalPe);
}

TEST(Sweep, WorkerCountFromEnvironment)
{
    ::setenv("NADS_WORKERS", "3", 1);
    EXPECT_EQ(sweep_workers(), 3u);
    ::setenv("NADS_WORKERS", "0", 1);
    EXPECT_THROW(sweep_workers(), ValidationError);
    ::setenv("NADS_WORKERS", "two", 1);
    EXPECT_THROW(sweep_workers(), ValidationError);
    ::unsetenv("NADS_WORKERS");
    EXPECT_GE(sweep_workers(), 1u);
}

TEST(Table, CsvFormatting)
{
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(format_real(-0.0), "0");
    EXPECT_EQ(format_real(1e300), "1.0000000000000001e+300");
    EXPECT_EQ(format_real(std::nan("")), "nan");
    EXPECT_EQ(csv_quote("a,b \"c\""), "\"a,b \"\"c\"\"\"");

    const std::string text = csv(cmd_snapshot(shipped("static_cw")));
    EXPECT_EQ(text.rfind("# nads snapshot\n", 0), 0u);
    EXPECT_NE(text.find("#     \"name\": \"static_cw\""), std::string::npos);
    EXPECT_NE(text.find("\nt,Omega,delta,Re_delta_tilde,Im_delta_tilde,"), std::string::npos);
}

TEST(Table, JsonMirrorCarriesTheSameNumbers)
{
    const Table t = cmd_snapshot(shipped("sech_pulse"));
    std::ostringstream out;
    write_json(out, t);
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_EQ(j["command"], "snapshot");
    EXPECT_EQ(j["scenario"]["name"], "sech_pulse");
    ASSERT_EQ(j["rows"].size(), t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); r += 97)
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            EXPECT_EQ(j["rows"][r][c].get<double>(), std::get<double>(t.rows[r][c]));
}

TEST(Table, JsonMirrorWritesNullForNan)
{
    Table t;
    t.command = "x";
    t.columns = {"a", "error"};
    t.rows = {{std::nan(""), std::string("boom")}};
    std::ostringstream out;
    write_json(out, t);
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_TRUE(j["rows"][0][0].is_null());
    EXPECT_EQ(j["rows"][0][1], "boom");
}

TEST(Validate, FreshBuildPassesEveryCheck)
{
    const ValidationReport r = run_validation();
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << " worst=" << c.worst << " " << c.error;
    ASSERT_NE(r.find("exponential_cancellation"), nullptr);
    EXPECT_LT(r.find("exponential_cancellation")->worst, 1e-9);
    std::ostringstream out;
    write_report_json(out, r);
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["checks"].size(), r.checks.size());
}

TEST(Validate, FlippedLambda2IsCaughtByName)
{
    ValidationHooks hooks;
    hooks.mutate_snapshot = [](NadsSnapshot& s) { s.lambda2 = -s.lambda2; };
    const ValidationReport r = run_validation(hooks);
    EXPECT_FALSE(r.passed());
    ASSERT_NE(r.find("lambda_consistency"), nullptr);
    EXPECT_FALSE(r.find("lambda_consistency")->passed);
    EXPECT_TRUE(r.find("trig_identity")->passed);
    std::ostringstream out;
    write_report_text(out, r);
    EXPECT_NE(out.str().find("FAIL lambda_consistency"), std::string::npos);
}
