#pragma once

#include "cribsim/bloch.hpp"
#include "cribsim/types.hpp"

namespace cribsim {

/// Gaussian input pulse. Time is measured in units of the 1/e half-duration
/// of the intensity envelope, so the amplitude profile is exp(-(t-tc)^2/2).
/// The total peak Rabi frequency splits between the channels by intensity
/// fractions (s_L, s_R); the relative phase sits on the sigma23 component.
struct PulseSpec {
    double peak_rabi = 1e-3;
    double center_time = -10.0;
    double split_left = 0.6;
    double split_right = 0.4;
    double relative_phase = 0.0;

    FieldSample sample(double t) const;

    /// 1/e intensity half-width of the pulse spectrum (unit duration pulse).
    double spectral_half_width() const { return 1.0; }
};

}  // namespace cribsim
