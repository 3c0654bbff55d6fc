#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cribsim/propagation.hpp"
#include "cribsim/types.hpp"

namespace cribsim {

/// Two complex polarization amplitudes (c_L, c_R). Input states are
/// normalized; outputs may carry norm below one (the retrieval efficiency).
struct QubitState {
    cplx c_left{};
    cplx c_right{};

    double norm2() const { return std::norm(c_left) + std::norm(c_right); }
};

/// Spectral energy of a uniformly sampled envelope: the discrete Fourier
/// transform with bins Omega(omega_k) = dt * sum_j Omega_j exp(i omega_k t_j)
/// integrated as sum_k |Omega(omega_k)|^2 domega / (2 pi). The 1/(2 pi)
/// normalization makes it equal the time-domain energy sum_j |Omega_j|^2 dt
/// (Parseval), so the Gaussian unit pulse carries energy sqrt(pi).
double spectral_energy(const std::vector<cplx>& series, double dt);

/// Time-domain energy sum |Omega|^2 dt; equals spectral_energy by Parseval.
double time_energy(const std::vector<cplx>& series, double dt);

/// Ratio of output to input spectral energies for one channel.
double efficiency(const std::vector<cplx>& input, const std::vector<cplx>& output, double dt);

/// Intensities normalized to the total input peak, the quantity plotted in
/// contour maps: |Omega_mu3(z,t)|^2 / (|Omega13(0,tc)|^2 + |Omega23(0,tc)|^2).
std::pair<Grid2D<double>, Grid2D<double>> normalized_intensity(const StageRecord& record,
                                                               double input_peak_intensity);

/// Weak-field verdict: pass iff all three maxima stay at or below the
/// threshold (weak-mode runs pass by construction with zero maxima).
bool weak_field_check(double max_p11, double max_p22, double max_s12, double threshold);

struct QubitTransfer {
    cplx t_left{};   // complex gain of the sigma13 channel
    cplx t_right{};  // complex gain of the sigma23 channel

    double relative_phase() const { return std::arg(t_left * std::conj(t_right)); }
};

struct QubitFidelity {
    double efficiency = 0.0;     // |c'_L|^2 + |c'_R|^2
    double conditional = 0.0;    // overlap with the renormalized output
    double unconditional = 0.0;  // efficiency * conditional (loss channel traced out)
};

/// Applies per-channel transfer coefficients to an input qubit and evaluates
/// the retrieval fidelities. Both coefficients zero leaves the conditional
/// fidelity undefined and throws.
QubitFidelity qubit_fidelity(const QubitState& input, cplx t_left, cplx t_right);

/// Complex transfer coefficients extracted from the zero-frequency spectral
/// peaks of the recorded boundary series, per channel.
QubitTransfer extract_transfer(const std::vector<cplx>& in13, const std::vector<cplx>& in23,
                               const std::vector<cplx>& out13, const std::vector<cplx>& out23,
                               double dt);

/// Peak normalized cross-correlation between two intensity profiles over all
/// integer lags; 1 means identical shapes.
double intensity_cross_correlation(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Per-run quality summary assembled by the orchestrator.
struct RunDiagnostics {
    double max_p11_avg = 0.0, max_p22_avg = 0.0, max_s12_avg = 0.0;
    double max_p11_class = 0.0, max_p22_class = 0.0, max_s12_class = 0.0;
    bool weak_field_pass = true;
    double max_field13 = 0.0, max_field23 = 0.0;
    std::vector<std::string> warnings;
};

}  // namespace cribsim
