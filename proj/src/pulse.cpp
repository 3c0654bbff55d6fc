#include "cribsim/pulse.hpp"

#include <cmath>

namespace cribsim {

FieldSample PulseSpec::sample(double t) const {
    const double g = peak_rabi * std::exp(-0.5 * (t - center_time) * (t - center_time));
    return {std::sqrt(split_left) * g, std::polar(std::sqrt(split_right) * g, relative_phase)};
}

}  // namespace cribsim
