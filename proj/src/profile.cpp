#include "cribsim/profile.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cribsim {

double InhomogeneousProfile::density(double delta) const {
    switch (shape) {
        case ProfileShape::Rectangular:
            return std::abs(delta) <= half_width ? 1.0 / (2.0 * half_width) : 0.0;
    }
    return 0.0;
}

double InhomogeneousProfile::j0() const {
    return 2.0 * std::numbers::pi * density(0.0);
}

DetuningGrid build_detuning_grid(const InhomogeneousProfile& profile, int n_classes,
                                 double total_window) {
    if (profile.half_width <= 0.0)
        throw ConfigError("broadening half_width must be positive");
    if (n_classes < 3)
        throw ConfigError("n_classes must be at least 3");
    if (n_classes % 2 == 0)
        throw ConfigError("n_classes must be odd (classes must be symmetric about delta = 0)");

    const double gamma = profile.half_width;
    const double spacing = 2.0 * gamma / (n_classes - 1);
    const double revival = 2.0 * std::numbers::pi / spacing;
    if (total_window > 0.0 && revival <= total_window) {
        // smallest odd class count whose revival time clears the window
        int required = static_cast<int>(std::ceil(gamma * total_window / std::numbers::pi)) + 1;
        if (required % 2 == 0) ++required;
        while (2.0 * std::numbers::pi * (required - 1) / (2.0 * gamma) <= total_window)
            required += 2;
        std::ostringstream msg;
        msg << "class revival time 2*pi/spacing = " << revival
            << " does not exceed the simulated time window " << total_window
            << "; increase n_classes to at least " << required;
        throw ConfigError(msg.str());
    }

    DetuningGrid grid;
    grid.half_width = gamma;
    grid.spacing = spacing;
    grid.revival_time = revival;
    grid.detunings.resize(n_classes);
    grid.weights.resize(n_classes);
    const int mid = (n_classes - 1) / 2;
    for (int n = 0; n < n_classes; ++n) {
        // build symmetrically so the list is exactly sign-symmetric
        grid.detunings[n] = (n - mid) * spacing;
        double w = profile.density(grid.detunings[n]) * spacing;
        if (n == 0 || n == n_classes - 1) w *= 0.5;
        grid.weights[n] = w;
    }
    grid.detunings[mid] = 0.0;
    return grid;
}

}  // namespace cribsim
