#include "cribsim/output.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "cribsim/metrics.hpp"

namespace cribsim {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json spec_json(const RunSpec& s) {
    ordered_json j;
    j["pulse"] = {{"peak_rabi", s.pulse.peak_rabi},
                  {"center_time", s.pulse.center_time},
                  {"split_left", s.pulse.split_left},
                  {"split_right", s.pulse.split_right},
                  {"relative_phase", s.pulse.relative_phase}};
    j["medium"] = {{"optical_depth", s.medium.optical_depth}, {"n_z", s.medium.n_z}};
    j["broadening"] = {{"half_width", s.broadening.half_width},
                       {"n_classes", s.broadening.n_classes}};
    j["protocol"] = {{"direction", to_string(s.protocol.direction)},
                     {"storage_time", s.protocol.storage_time},
                     {"phase_matching", s.backward()}};
    j["deterministic_phases"] = {{"phi1", s.phases.phi1},
                                 {"phi2", s.phases.phi2},
                                 {"phi3", s.phases.phi3}};
    auto k = [](double v) {
        return std::isinf(v) ? ordered_json("inf") : ordered_json(v);
    };
    j["noise"] = {{"mode", s.noise.mode == NoiseMode::Analytic ? "analytic" : "monte_carlo"},
                  {"k1", k(s.noise.k1)},
                  {"k2", k(s.noise.k2)},
                  {"k3", k(s.noise.k3)},
                  {"n_samples", s.noise.n_samples}};
    j["numerics"] = {{"dt", s.numerics.dt},
                     {"window_start", s.numerics.window_start},
                     {"window_end", s.numerics.window_end},
                     {"bloch", s.numerics.bloch == BlochMode::Weak ? "weak" : "full"},
                     {"weak_threshold", s.numerics.weak_threshold},
                     {"population_threshold", s.numerics.population_threshold}};
    return j;
}

}  // namespace

std::string summary_json(const RunResult& r) {
    ordered_json j;
    j["schema_version"] = 1;
    j["parameters"] = spec_json(r.spec);
    j["seed"] = r.spec.noise.seed;
    j["efficiency"] = {
        {"channel_13",
         {{"exit_face", r.eff13.exit_face},
          {"max_over_z", r.eff13.max_over_z},
          {"transmitted", r.eff13.transmitted}}},
        {"channel_23",
         {{"exit_face", r.eff23.exit_face},
          {"max_over_z", r.eff23.max_over_z},
          {"transmitted", r.eff23.transmitted}}}};
    j["qubit"] = {{"transfer_13_re", r.qubit.transfer.t_left.real()},
                  {"transfer_13_im", r.qubit.transfer.t_left.imag()},
                  {"transfer_23_re", r.qubit.transfer.t_right.real()},
                  {"transfer_23_im", r.qubit.transfer.t_right.imag()},
                  {"relative_phase", r.qubit.relative_phase},
                  {"efficiency", r.qubit.fidelity.efficiency},
                  {"conditional_fidelity", r.qubit.fidelity.conditional},
                  {"unconditional_fidelity", r.qubit.fidelity.unconditional}};
    j["diagnostics"] = {{"max_population_1", r.diagnostics.max_p11_avg},
                        {"max_population_2", r.diagnostics.max_p22_avg},
                        {"max_coherence_12", r.diagnostics.max_s12_avg},
                        {"max_population_1_per_class", r.diagnostics.max_p11_class},
                        {"max_population_2_per_class", r.diagnostics.max_p22_class},
                        {"max_coherence_12_per_class", r.diagnostics.max_s12_class},
                        {"weak_field_pass", r.diagnostics.weak_field_pass},
                        {"max_field_13", r.diagnostics.max_field13},
                        {"max_field_23", r.diagnostics.max_field23},
                        {"warnings", r.diagnostics.warnings}};
    j["analytic"] = {{"gamma_backward", r.analytic.gamma_backward},
                     {"gamma_forward_exit", r.analytic.gamma_forward_exit},
                     {"gamma_forward_max", r.analytic.gamma_forward_max},
                     {"k_factor_1", r.analytic.k1},
                     {"k_factor_2", r.analytic.k2},
                     {"k_factor_3", r.analytic.k3},
                     {"predicted_efficiency_exit_13", r.analytic.predicted_exit13},
                     {"predicted_efficiency_exit_23", r.analytic.predicted_exit23},
                     {"predicted_efficiency_max_13", r.analytic.predicted_max13},
                     {"predicted_efficiency_max_23", r.analytic.predicted_max23}};
    return j.dump(2) + "\n";
}

void write_stage_csv(const StageRecord& record, double input_peak_intensity,
                     const std::filesystem::path& path) {
    const auto [i13, i23] = normalized_intensity(record, input_peak_intensity);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    out << "t,z,I13,I23\n";
    char buf[160];
    for (int i = 0; i < record.n_z(); ++i) {
        for (int j = 0; j < record.n_t(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g\n", record.times[j],
                          record.depths[i], i13(i, j), i23(i, j));
            out << buf;
        }
    }
    if (!out) throw ConfigError("failed writing output file: " + path.string());
}

std::vector<std::filesystem::path> write_run_outputs(const RunResult& result,
                                                     const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    try {
        const auto summary = out_dir / (result.spec.output.prefix + "_summary.json");
        {
            std::ofstream out(summary);
            if (!out) throw ConfigError("cannot open output file: " + summary.string());
            out << summary_json(result);
        }
        written.push_back(summary);
        if (result.spec.output.write_grids) {
            for (const StageRecord* rec : {&result.absorption, &result.retrieval}) {
                const auto path = out_dir / (result.spec.output.prefix + "_stage_" +
                                             to_string(rec->tag) + ".csv");
                write_stage_csv(*rec, result.input_peak_intensity, path);
                written.push_back(path);
            }
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) std::filesystem::remove(p, ec);
        throw;
    }
    return written;
}

}  // namespace cribsim
