// kdqlab: command-line front end for the KD quasi-probability engine.
//
//   kdqlab scenario <name> [--theta R] [--deg] [--format table|json|csv]
//   kdqlab kd <file> [--format ...]
//   kdqlab weak <file> --kappa k1,k2,... --coupling g --width s --shots N --seed S [--sweep]

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kdqlab/cli.hpp"

namespace cli = kdqlab::cli;

int main(int argc, char** argv) {
    CLI::App app{"Kirkwood-Dirac quasi-probabilities and quantum paradox reports"};
    app.require_subcommand(1);

    std::string format = "table";

    std::string scenario_name;
    double theta = 0.0;
    bool degrees = false;
    auto* scenario = app.add_subcommand("scenario", "run a built-in paradox scenario");
    scenario->add_option("name", scenario_name, "leggett-garg | three-box | cheshire-cat | hardy | peres-mermin | bell")
        ->required();
    auto* theta_opt = scenario->add_option("--theta", theta, "angle parameter (radians unless --deg)");
    scenario->add_flag("--deg", degrees, "interpret --theta in degrees");
    scenario->add_option("--format", format, "table | json | csv");

    std::string kd_file;
    auto* kd = app.add_subcommand("kd", "evaluate a scenario file");
    kd->add_option("file", kd_file, "scenario file (JSON)")->required();
    kd->add_option("--format", format, "table | json | csv");

    std::string weak_file;
    std::string kappa;
    cli::WeakOptions weak_opt;
    auto* weak = app.add_subcommand("weak", "simulate a Gaussian-pointer weak measurement of M");
    weak->add_option("file", weak_file, "scenario file (JSON)")->required();
    weak->add_option("--kappa", kappa, "comma-separated eigenvalues of the measured observable, one per m");
    weak->add_option("--coupling", weak_opt.coupling, "pointer shift g per unit eigenvalue");
    weak->add_option("--width", weak_opt.width, "initial pointer standard deviation s");
    weak->add_option("--shots", weak_opt.shots, "number of Monte Carlo shots");
    weak->add_option("--seed", weak_opt.seed, "random seed");
    weak->add_option("--threads", weak_opt.threads, "sampling threads (0 = all cores; output does not depend on it)");
    weak->add_flag("--sweep", weak_opt.sweep, "tabulate the approach to the weak value over s/g = 2..64");
    weak->add_option("--format", format, "table | json | csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitUsage;
    }

    cli::Format fmt_choice;
    try {
        fmt_choice = cli::parse_format(format);
    } catch (const cli::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    }

    if (*scenario) {
        cli::ScenarioOptions opt;
        if (theta_opt->count() > 0) opt.theta = theta;
        opt.degrees = degrees;
        opt.format = fmt_choice;
        return cli::run_scenario(scenario_name, opt, std::cout, std::cerr);
    }
    if (*kd) return cli::run_kd(kd_file, fmt_choice, std::cout, std::cerr);

    try {
        if (!kappa.empty()) weak_opt.kappa = cli::parse_kappa_list(kappa);
    } catch (const cli::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    }
    weak_opt.format = fmt_choice;
    return cli::run_weak(weak_file, weak_opt, std::cout, std::cerr);
}
