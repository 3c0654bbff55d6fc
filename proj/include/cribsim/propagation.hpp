#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cribsim/config.hpp"
#include "cribsim/ensemble.hpp"
#include "cribsim/types.hpp"

namespace cribsim {

enum class StageTag { Absorption, RetrievalForward, RetrievalBackward };

const char* to_string(StageTag tag);

/// Spatio-temporal record of the propagating field envelopes for one stage.
/// Rows are indexed by z node (ascending optical depth) irrespective of the
/// sweep direction; the boundary series are the first and last rows.
struct StageRecord {
    StageTag tag = StageTag::Absorption;
    std::vector<double> times;
    std::vector<double> depths;
    Grid2D<cplx> omega13;
    Grid2D<cplx> omega23;
    double max_abs13 = 0.0;  // peak |omega| seen anywhere in the stage
    double max_abs23 = 0.0;

    int n_z() const { return static_cast<int>(depths.size()); }
    int n_t() const { return static_cast<int>(times.size()); }
    /// Node the retrieved (or transmitted) field leaves through.
    int exit_node() const { return tag == StageTag::RetrievalBackward ? 0 : n_z() - 1; }
    int launch_node() const { return tag == StageTag::RetrievalBackward ? n_z() - 1 : 0; }

    std::vector<cplx> series13(int node) const {
        return {omega13.row(node), omega13.row(node) + n_t()};
    }
    std::vector<cplx> series23(int node) const {
        return {omega23.row(node), omega23.row(node) + n_t()};
    }
};

/// Peak excited-state population / two-photon coherence seen during a stage,
/// both as the class-weighted ensemble average at each (z, t) and as the raw
/// per-class extreme. Only populated by full-mode runs.
struct StageMaxima {
    double p11_avg = 0.0, p22_avg = 0.0, s12_avg = 0.0;
    double p11_class = 0.0, p22_class = 0.0, s12_class = 0.0;

    void merge(const StageMaxima& o);
};

/// Quadrature replacement of the inhomogeneous integral in the propagation
/// equation: -(+) i * prefactor * sum_n w_n sigma_mu3^(n) for the forward
/// (backward) mode, per channel.
std::pair<cplx, cplx> field_source(std::span<const cplx> s13, std::span<const cplx> s23,
                                   std::span<const double> weights, double prefactor,
                                   Direction direction);

/// Absorption stage: z sweep from the front face in the retarded frame, the
/// input pulse entering at z = 0. The ensemble must be in the ground state.
StageRecord run_absorption(const RunSpec& spec, EnsembleState& ens, StageMaxima* maxima = nullptr);

/// Retrieval stage with zero field at the launch face (z = 0 forward, z = L
/// backward). Detunings must be reversed and phase matching applied exactly
/// for backward retrieval.
StageRecord run_retrieval(const RunSpec& spec, EnsembleState& ens, Direction direction,
                          StageMaxima* maxima = nullptr);

/// Flips the sign of every class detuning for subsequent evolution; the
/// class-to-coherence binding is preserved. Toggles the reversal flag so the
/// orchestrator can detect an accidental double reversal.
void reverse_detunings(EnsembleState& ens);

/// Moves the forward atomic excitation components into backward components
/// (the net effect of the counter-propagating pi-pulse pair).
void apply_phase_matching(EnsembleState& ens);

/// Exact free evolution for a field-free interval: each class coherence
/// rotates by exp(i delta t) under its current detuning.
void free_evolution(EnsembleState& ens, double duration);

}  // namespace cribsim
