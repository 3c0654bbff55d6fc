#pragma once

#include <vector>

#include "cribsim/profile.hpp"
#include "cribsim/types.hpp"

namespace cribsim {

// Closed-form response of an inhomogeneously broadened two-level channel.
// All spectral arguments are in units of 1/T0; depths are optical depths.
//
// For the rectangular profile of half width Gamma:
//   H(omega) = pi G(omega) + (i/2 Gamma) ln|(Gamma+omega)/(Gamma-omega)|
//   F(omega) = H(omega)          (the two one-sided integrals coincide for
//                                 an even distribution)
//   J(omega) = 2 pi G(omega)
// so F(omega) + H(-omega) = J(omega) is real and the retrieval coefficients
// reduce to the narrowband forms evaluated with the flat absorption profile.

/// Absorption response; |omega| = Gamma sits on the log singularity and is
/// rejected (evaluate one grid point away instead).
cplx response_H(double omega, const InhomogeneousProfile& profile);

/// Retrieval self-coupling response F and emission kernel J.
std::pair<cplx, double> response_F_and_J(double omega, const InhomogeneousProfile& profile);

enum class GammaMode { Full, Narrowband };

/// Backward retrieval coefficient. Narrowband: 1 - exp(-optical_depth).
/// Full mode evaluates J/(F + H(-omega)) (1 - exp(-L eta (F + H(-omega))))
/// with L eta expressed through the target optical depth.
cplx gamma_backward(double optical_depth, double omega, const InhomogeneousProfile& profile,
                    GammaMode mode);

/// Forward retrieval coefficient as a function of the propagation depth u.
/// Narrowband: u exp(-u/2), maximal 2/e at u = 2.
cplx gamma_forward(double depth_u, double omega, const InhomogeneousProfile& profile,
                   GammaMode mode);

/// Noise-degraded narrowband efficiency (K(k_mu) K(k_3) gamma)^2 for one
/// channel (1 -> sigma13, 2 -> sigma23). Forward uses the exit-face depth or
/// the interior maximum depending on max_over_depth.
double noisy_efficiency(double optical_depth, double k1, double k2, double k3,
                        Direction direction, int channel, bool max_over_depth);

/// Input-output phase fidelity |s_L + exp(i phi) s_R|^2 of a polarization
/// qubit retrieved with a relative phase phi between the channels.
double phase_fidelity(double s_left, double s_right, double phi);

struct MaxEfficiencyRow {
    double k3;
    double backward;  // K(k3)^2
    double forward;   // K(k3)^2 (2/e)^2
};

/// Large-depth efficiency ceilings as a function of the noise width.
std::vector<MaxEfficiencyRow> efficiency_max_curve(const std::vector<double>& k3_grid);

}  // namespace cribsim
