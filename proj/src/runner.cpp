#include "cribsim/runner.hpp"

#include <algorithm>
#include <cmath>

#include "cribsim/analytic.hpp"
#include "cribsim/phase_noise.hpp"

namespace cribsim {

namespace {

int nearest_index(const std::vector<double>& grid, double value) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(grid.size()); ++i)
        if (std::abs(grid[i] - value) < std::abs(grid[best] - value)) best = i;
    return best;
}

double max_over_z_efficiency(const StageRecord& rec, const Grid2D<cplx>& omega,
                             double input_energy, double dt) {
    double best = 0.0;
    for (int i = 0; i < rec.n_z(); ++i) {
        double e = 0.0;
        const cplx* row = omega.row(i);
        for (int j = 0; j < rec.n_t(); ++j) e += std::norm(row[j]);
        best = std::max(best, e * dt);
    }
    return best / input_energy;
}

}  // namespace

AbsorbedMedium absorb(const RunSpec& spec) {
    const DetuningGrid grid =
        build_detuning_grid(spec.profile(), spec.broadening.n_classes, spec.total_window());
    AbsorbedMedium medium;
    medium.spec = spec;
    medium.ensemble = init_ground_state(spec.medium.n_z, grid, spec.numerics.bloch);
    medium.record = run_absorption(spec, medium.ensemble, &medium.maxima);
    return medium;
}

RunResult finish_protocol(const AbsorbedMedium& medium, const RunSpec& variant) {
    const RunSpec& base = medium.spec;
    if (!(base.pulse == variant.pulse) || !(base.medium == variant.medium) ||
        !(base.broadening == variant.broadening) || !(base.numerics == variant.numerics))
        throw ConfigError("retrieval variant is incompatible with the absorbed medium");

    RunResult result;
    result.spec = variant;
    result.absorption = medium.record;

    EnsembleState ens = medium.ensemble;
    free_evolution(ens, variant.protocol.storage_time);
    reverse_detunings(ens);
    if (variant.backward()) apply_phase_matching(ens);
    if (!variant.phases.trivial()) apply_level_phases(ens, variant.phases);
    apply_phase_noise(ens, variant.noise);

    StageMaxima maxima = medium.maxima;
    result.retrieval = run_retrieval(variant, ens, variant.protocol.direction, &maxima);

    // --- metrics ---------------------------------------------------------
    const double dt = variant.numerics.dt;
    const auto in13 = result.absorption.series13(0);
    const auto in23 = result.absorption.series23(0);
    const auto out13 = result.retrieval.series13(result.retrieval.exit_node());
    const auto out23 = result.retrieval.series23(result.retrieval.exit_node());

    result.eff13.exit_face = efficiency(in13, out13, dt);
    result.eff23.exit_face = efficiency(in23, out23, dt);
    const double ein13 = spectral_energy(in13, dt);
    const double ein23 = spectral_energy(in23, dt);
    result.eff13.max_over_z =
        max_over_z_efficiency(result.retrieval, result.retrieval.omega13, ein13, dt);
    result.eff23.max_over_z =
        max_over_z_efficiency(result.retrieval, result.retrieval.omega23, ein23, dt);
    result.eff13.transmitted =
        time_energy(result.absorption.series13(result.absorption.n_z() - 1), dt) / ein13;
    result.eff23.transmitted =
        time_energy(result.absorption.series23(result.absorption.n_z() - 1), dt) / ein23;

    const int tc = nearest_index(result.absorption.times, variant.pulse.center_time);
    result.input_peak_intensity =
        std::norm(result.absorption.omega13(0, tc)) + std::norm(result.absorption.omega23(0, tc));

    result.qubit.transfer = extract_transfer(in13, in23, out13, out23, dt);
    result.qubit.relative_phase = result.qubit.transfer.relative_phase();
    const QubitState input{std::sqrt(variant.pulse.split_left),
                           std::polar(std::sqrt(variant.pulse.split_right),
                                      variant.pulse.relative_phase)};
    const bool empty_retrieval =
        result.qubit.transfer.t_left == cplx{} && result.qubit.transfer.t_right == cplx{};
    if (empty_retrieval) {
        // nothing retrieved (empty medium or fully scrambled phases)
        result.qubit.fidelity = {};
    } else {
        result.qubit.fidelity =
            qubit_fidelity(input, result.qubit.transfer.t_left, result.qubit.transfer.t_right);
    }

    result.diagnostics.max_p11_avg = maxima.p11_avg;
    result.diagnostics.max_p22_avg = maxima.p22_avg;
    result.diagnostics.max_s12_avg = maxima.s12_avg;
    result.diagnostics.max_p11_class = maxima.p11_class;
    result.diagnostics.max_p22_class = maxima.p22_class;
    result.diagnostics.max_s12_class = maxima.s12_class;
    result.diagnostics.weak_field_pass =
        weak_field_check(maxima.p11_avg, maxima.p22_avg, maxima.s12_avg,
                         variant.numerics.population_threshold);
    result.diagnostics.max_field13 =
        std::max(result.absorption.max_abs13, result.retrieval.max_abs13);
    result.diagnostics.max_field23 =
        std::max(result.absorption.max_abs23, result.retrieval.max_abs23);
    result.diagnostics.warnings = variant.warnings;
    if (empty_retrieval)
        result.diagnostics.warnings.push_back(
            "retrieved field is empty; qubit fidelity undefined");
    const double peak = std::max(result.diagnostics.max_field13, result.diagnostics.max_field23);
    if (peak > variant.numerics.weak_threshold * (1.0 + 1e-12))
        result.diagnostics.warnings.push_back(
            "peak field amplitude exceeded the weak-field threshold during the run");

    // --- analytic reference ------------------------------------------------
    const double al = variant.medium.optical_depth;
    AnalyticSummary& an = result.analytic;
    an.gamma_backward = -std::expm1(-al);
    an.gamma_forward_exit = al * std::exp(-al / 2.0);
    const double u_max = std::min(2.0, al);
    an.gamma_forward_max = u_max * std::exp(-u_max / 2.0);
    auto kf = [](double k) { return std::isinf(k) ? 1.0 : dephasing_factor(k); };
    an.k1 = kf(variant.noise.k1);
    an.k2 = kf(variant.noise.k2);
    an.k3 = kf(variant.noise.k3);
    const Direction dir = variant.protocol.direction;
    an.predicted_exit13 =
        noisy_efficiency(al, variant.noise.k1, variant.noise.k2, variant.noise.k3, dir, 1, false);
    an.predicted_exit23 =
        noisy_efficiency(al, variant.noise.k1, variant.noise.k2, variant.noise.k3, dir, 2, false);
    an.predicted_max13 =
        noisy_efficiency(al, variant.noise.k1, variant.noise.k2, variant.noise.k3, dir, 1, true);
    an.predicted_max23 =
        noisy_efficiency(al, variant.noise.k1, variant.noise.k2, variant.noise.k3, dir, 2, true);
    return result;
}

RunResult run_protocol(const RunSpec& spec) {
    return finish_protocol(absorb(spec), spec);
}

}  // namespace cribsim
