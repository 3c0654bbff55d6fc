// Command-line front end: run | sweep | analytic | validate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cribsim/analytic_tables.hpp"
#include "cribsim/config.hpp"
#include "cribsim/output.hpp"
#include "cribsim/runner.hpp"
#include "cribsim/sweep.hpp"
#include "cribsim/validate.hpp"

namespace {

using namespace cribsim;

std::vector<double> parse_list(const std::string& csv, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "inf") {
            out.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("invalid value '" + item + "' in " + flag);
        }
    }
    if (out.empty()) throw ConfigError(flag + " must contain at least one value");
    return out;
}

RunSpec load_spec(const std::string& config_path, long seed_override) {
    RunSpec spec = config_path.empty() ? [] {
        RunSpec s;
        validate_spec(s);
        return s;
    }() : parse_config(config_path);
    if (seed_override >= 0) spec.noise.seed = static_cast<std::uint64_t>(seed_override);
    return spec;
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CRIB photon-echo quantum memory simulator for polarization qubits in "
                 "V-type three-level media"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    long seed_override = -1;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* c = cmd->add_option("--config", config_path, "run configuration file");
        if (config_required) c->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed_override, "override the configured noise seed");
        cmd->add_option("--threads", threads, "worker thread count (results are invariant)");
    };

    auto* cmd_run = app.add_subcommand("run", "execute one protocol run");
    add_common(cmd_run, true);

    auto* cmd_sweep = app.add_subcommand("sweep", "grid of runs over optical depth and k3");
    add_common(cmd_sweep, true);
    std::string depth_list = "0.5,1,1.5,2,3,4.5,6,8";
    std::string k3_list = "0,1,5,20";
    cmd_sweep->add_option("--optical-depth", depth_list, "comma-separated optical depths");
    cmd_sweep->add_option("--k3", k3_list, "comma-separated k3 values (inf = no noise)");

    auto* cmd_analytic = app.add_subcommand("analytic", "emit closed-form reference tables");
    add_common(cmd_analytic, false);

    auto* cmd_validate = app.add_subcommand("validate", "run the acceptance suite");
    add_common(cmd_validate, false);
    bool skip_convergence = false;
    cmd_validate->add_flag("--skip-convergence", skip_convergence,
                           "skip the grid-refinement criterion");

    CLI11_PARSE(app, argc, argv);

    try {
        apply_threads(threads);
        if (cmd_run->parsed()) {
            const RunSpec spec = load_spec(config_path, seed_override);
            for (const auto& w : spec.warnings) std::cerr << "warning: " << w << "\n";
            const RunResult result = run_protocol(spec);
            const auto written = write_run_outputs(result, out_dir);
            std::cout << "eff13 exit " << result.eff13.exit_face << ", max "
                      << result.eff13.max_over_z << "; eff23 exit " << result.eff23.exit_face
                      << ", max " << result.eff23.max_over_z << "; conditional fidelity "
                      << result.qubit.fidelity.conditional << "\n";
            for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
        } else if (cmd_sweep->parsed()) {
            const RunSpec spec = load_spec(config_path, seed_override);
            const auto rows = run_sweep(spec, parse_list(depth_list, "--optical-depth"),
                                        parse_list(k3_list, "--k3"));
            std::filesystem::create_directories(out_dir);
            const auto path = std::filesystem::path(out_dir) /
                              (spec.output.prefix + "_sweep.csv");
            write_sweep_csv(rows, spec.protocol.direction, path);
            std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
        } else if (cmd_analytic->parsed()) {
            for (const auto& p : write_analytic_tables(out_dir))
                std::cout << "wrote " << p.string() << "\n";
        } else if (cmd_validate->parsed()) {
            const RunSpec spec = load_spec(config_path, seed_override);
            AcceptanceOptions options;
            options.convergence = !skip_convergence;
            options.progress = &std::cout;
            const auto results = run_acceptance(spec, options);
            std::filesystem::create_directories(out_dir);
            const auto path = std::filesystem::path(out_dir) / "validation_report.json";
            std::ofstream out(path);
            out << acceptance_report_json(results);
            std::cout << "wrote " << path.string() << "\n";
            if (!all_passed(results)) return 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
