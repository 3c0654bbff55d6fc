#pragma once

#include <vector>

#include "cribsim/types.hpp"

namespace cribsim {

// All frequencies are in units of 1/T0 and all times in units of T0, where T0
// is the 1/e half-duration of the input pulse intensity envelope. The
// longitudinal coordinate is the cumulative optical depth u = alpha*z.

enum class ProfileShape { Rectangular };

/// Inhomogeneous frequency distribution G(delta) of the broadened transition,
/// normalized to unit integral and even in delta.
struct InhomogeneousProfile {
    ProfileShape shape = ProfileShape::Rectangular;
    double half_width = 10.0;  // Gamma

    /// Density G(delta). Rectangular: 1/(2*Gamma) on [-Gamma, Gamma].
    double density(double delta) const;

    /// 2*pi*G(0); converts the class-averaged coherence into the field source
    /// once runs are parameterized by optical depth.
    double j0() const;
};

/// Equidistant frequency classes spanning [-Gamma, Gamma] with trapezoid
/// quadrature weights of G. Weights sum to one; detunings are sign-symmetric.
struct DetuningGrid {
    double half_width = 0.0;
    std::vector<double> detunings;
    std::vector<double> weights;
    double spacing = 0.0;       // class separation
    double revival_time = 0.0;  // 2*pi/spacing: spurious discrete-comb echo time

    int size() const { return static_cast<int>(detunings.size()); }
};

/// Builds the class grid. n_classes must be odd (a resonant class is required
/// for symmetry about delta = 0) and at least 3. If total_window > 0 the
/// revival time 2*pi/spacing must exceed it, otherwise a ConfigError with the
/// minimum admissible n_classes is thrown.
DetuningGrid build_detuning_grid(const InhomogeneousProfile& profile, int n_classes,
                                 double total_window = 0.0);

}  // namespace cribsim
