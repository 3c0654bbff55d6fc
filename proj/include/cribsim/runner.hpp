#pragma once

#include "cribsim/config.hpp"
#include "cribsim/metrics.hpp"
#include "cribsim/propagation.hpp"
#include "cribsim/types.hpp"

namespace cribsim {

struct ChannelEfficiency {
    double exit_face = 0.0;
    double max_over_z = 0.0;
    double transmitted = 0.0;  // leakage through z = L during absorption
};

struct QubitResult {
    QubitTransfer transfer;
    double relative_phase = 0.0;
    QubitFidelity fidelity;
};

struct AnalyticSummary {
    double gamma_backward = 0.0;
    double gamma_forward_exit = 0.0;
    double gamma_forward_max = 0.0;
    double k1 = 1.0, k2 = 1.0, k3 = 1.0;  // dephasing factors
    double predicted_exit13 = 0.0, predicted_exit23 = 0.0;
    double predicted_max13 = 0.0, predicted_max23 = 0.0;
};

struct RunResult {
    RunSpec spec;
    StageRecord absorption;
    StageRecord retrieval;
    ChannelEfficiency eff13, eff23;
    QubitResult qubit;
    RunDiagnostics diagnostics;
    AnalyticSummary analytic;
    double input_peak_intensity = 0.0;  // normalization of the contour grids
};

/// Ensemble and field record after the absorption stage. Absorption does not
/// depend on the retrieval direction, phases or noise, so one absorbed medium
/// can feed several retrieval variants.
struct AbsorbedMedium {
    RunSpec spec;
    EnsembleState ensemble;
    StageRecord record;
    StageMaxima maxima;
};

AbsorbedMedium absorb(const RunSpec& spec);

/// Storage, reversal (plus phase matching for backward retrieval),
/// deterministic phases, phase noise, retrieval and all metrics. The variant
/// must share the pulse, medium, broadening and numerics of the absorbed
/// medium; protocol, phases and noise may differ.
RunResult finish_protocol(const AbsorbedMedium& medium, const RunSpec& variant);

/// Executes the whole protocol for one spec.
RunResult run_protocol(const RunSpec& spec);

}  // namespace cribsim
