// nads: command-line driver.
//
//   nads snapshot <file> [--out <path>] [--json <path>]
//   nads evolve <file> [--compare] [--out <path>] [--json <path>]
//   nads sweep <file> --axis <path>:<min>:<max>:<count>[:log] [--axis ...] --reduce <name>
//   nads validate [--json]
//
// Exit status: 0 ok, 1 parse or validation failure, 2 numerical failure.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nads/commands.hpp"
#include "nads/scenario.hpp"
#include "nads/table.hpp"
#include "nads/validation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigFailure = 1;
constexpr int kNumericalFailure = 2;

struct OutputOptions {
    std::string out;
    std::string json;
};

void add_output_options(CLI::App* cmd, OutputOptions& o)
{
    cmd->add_option("--out,-o", o.out, "CSV output path (default: stdout)");
    cmd->add_option("--json", o.json, "also write a JSON mirror of the table to this path");
}

void emit(const nads::Table& table, const OutputOptions& o)
{
    if (o.out.empty()) {
        nads::write_csv(std::cout, table);
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw nads::ConfigError("cannot write " + o.out);
        nads::write_csv(f, table);
    }
    if (!o.json.empty()) {
        std::ofstream f(o.json, std::ios::binary);
        if (!f) throw nads::ConfigError("cannot write " + o.json);
        nads::write_json(f, table);
    }
}

nads::Scenario load(const std::string& path)
{
    nads::Scenario s = nads::load_scenario(path);
    for (const auto& w : s.warnings) std::cerr << "nads: warning: " << w << "\n";
    return s;
}

std::string reducer_help()
{
    std::string help = "scalar reduced per sweep point:";
    for (const auto& r : nads::kReducers) help += std::string("\n  ") + r.name + ": " + r.help;
    return help;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nonadiabatic dressed states of a driven, damped two-level system"};
    app.require_subcommand(1);

    std::string file;
    OutputOptions out;

    auto* snapshot = app.add_subcommand("snapshot", "dressed-state quantities, overlaps and P on the grid");
    snapshot->add_option("file", file, "scenario file")->required();
    add_output_options(snapshot, out);

    bool compare = false;
    auto* evolve = app.add_subcommand("evolve", "integrate the bare-state amplitudes from |g>");
    evolve->add_option("file", file, "scenario file")->required();
    evolve->add_flag("--compare", compare, "add |c_e/c_g| from the dressed-state reconstruction");
    add_output_options(evolve, out);

    std::vector<std::string> axes;
    std::string reduce;
    auto* sweep = app.add_subcommand("sweep", "reduce one scalar over a 1- or 2-axis parameter grid");
    sweep->add_option("file", file, "base scenario file")->required();
    sweep->add_option("--axis", axes, "<path>:<min>:<max>:<count>[:log]")->required();
    sweep->add_option("--reduce", reduce, reducer_help())->required();
    add_output_options(sweep, out);

    bool json_report = false;
    auto* validate = app.add_subcommand("validate", "run the built-in invariant suite");
    validate->add_flag("--json", json_report, "machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigFailure;
    }

    try {
        if (*snapshot) {
            emit(nads::cmd_snapshot(load(file)), out);
        } else if (*evolve) {
            const nads::Scenario s = load(file);
            emit(nads::cmd_evolve(s, compare || s.wants(nads::Output::Compare)), out);
        } else if (*sweep) {
            nads::SweepSpec spec;
            spec.base = load(file);
            for (const auto& a : axes) spec.axes.push_back(nads::parse_axis(a));
            spec.reduce = nads::parse_reducer(reduce);
            nads::validate(spec);
            emit(nads::cmd_sweep(spec, nads::sweep_workers()), out);
        } else if (*validate) {
            const nads::ValidationReport report = nads::run_validation();
            if (json_report)
                nads::write_report_json(std::cout, report);
            else
                nads::write_report_text(std::cout, report);
            return report.passed() ? kOk : kConfigFailure;
        }
    } catch (const nads::NumericalError& e) {
        std::cerr << "nads: numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const nads::ConfigError& e) {
        std::cerr << "nads: " << e.what() << "\n";
        return kConfigFailure;
    }
    return kOk;
}
