#include "cribsim/analytic.hpp"

#include <cmath>
#include <numbers>

#include "cribsim/phase_noise.hpp"

namespace cribsim {

namespace {

// principal-value part (1/2 Gamma) ln|(Gamma+omega)/(Gamma-omega)|
double pv_log(double omega, double gamma) {
    return std::log(std::abs((gamma + omega) / (gamma - omega))) / (2.0 * gamma);
}

void check_edge(double omega, const InhomogeneousProfile& profile) {
    if (std::abs(std::abs(omega) - profile.half_width) < 1e-12 * profile.half_width)
        throw ConfigError("response functions are singular at |omega| = half_width; "
                          "evaluate one grid point away");
}

// (1 - exp(-x))/x continued through x = 0
cplx expm1_ratio(cplx x) {
    if (std::abs(x) < 1e-6) return 1.0 - x / 2.0 + x * x / 6.0;
    return (1.0 - std::exp(-x)) / x;
}

// sinh(x)/x continued through x = 0
cplx sinhc(cplx x) {
    if (std::abs(x) < 1e-6) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

}  // namespace

cplx response_H(double omega, const InhomogeneousProfile& profile) {
    check_edge(omega, profile);
    const double gamma = profile.half_width;
    return {std::numbers::pi * profile.density(-omega), pv_log(omega, gamma)};
}

std::pair<cplx, double> response_F_and_J(double omega, const InhomogeneousProfile& profile) {
    check_edge(omega, profile);
    // with an even G the F integral collapses onto H
    return {response_H(omega, profile), 2.0 * std::numbers::pi * profile.density(omega)};
}

cplx gamma_backward(double optical_depth, double omega, const InhomogeneousProfile& profile,
                    GammaMode mode) {
    if (optical_depth < 0.0) throw ConfigError("optical depth must be non-negative");
    if (mode == GammaMode::Narrowband) return -std::expm1(-optical_depth);
    const auto [f, j] = response_F_and_J(omega, profile);
    const cplx denom = f + std::conj(response_H(omega, profile));  // F + H(-omega)
    const double l_eta = optical_depth / profile.j0();
    return j * l_eta * expm1_ratio(l_eta * denom);
}

cplx gamma_forward(double depth_u, double omega, const InhomogeneousProfile& profile,
                   GammaMode mode) {
    if (depth_u < 0.0) throw ConfigError("depth must be non-negative");
    if (mode == GammaMode::Narrowband) return depth_u * std::exp(-depth_u / 2.0);
    const auto [f, j] = response_F_and_J(omega, profile);
    const cplx h_neg = std::conj(response_H(omega, profile));
    const double z_eta = depth_u / profile.j0();
    return z_eta * j * std::exp(-z_eta * (f + h_neg) / 2.0) * sinhc(z_eta * (f - h_neg) / 2.0);
}

double noisy_efficiency(double optical_depth, double k1, double k2, double k3,
                        Direction direction, int channel, bool max_over_depth) {
    if (channel != 1 && channel != 2) throw ConfigError("channel must be 1 or 2");
    const double k_mu = channel == 1 ? k1 : k2;
    const double k = dephasing_factor(k_mu) * dephasing_factor(k3);
    double g;
    if (direction == Direction::Backward) {
        g = -std::expm1(-optical_depth);
    } else {
        const double u = max_over_depth ? std::min(2.0, optical_depth) : optical_depth;
        g = u * std::exp(-u / 2.0);
    }
    const double kg = k * g;
    return kg * kg;
}

double phase_fidelity(double s_left, double s_right, double phi) {
    if (std::abs(s_left + s_right - 1.0) > 1e-9)
        throw ConfigError("intensity split must satisfy s_L + s_R = 1");
    return std::norm(s_left + std::polar(s_right, phi));
}

std::vector<MaxEfficiencyRow> efficiency_max_curve(const std::vector<double>& k3_grid) {
    std::vector<MaxEfficiencyRow> rows;
    rows.reserve(k3_grid.size());
    const double forward_cap = std::pow(2.0 / std::numbers::e, 2.0);
    for (double k3 : k3_grid) {
        const double k2 = std::pow(dephasing_factor(k3), 2.0);
        rows.push_back({k3, k2, k2 * forward_cap});
    }
    return rows;
}

}  // namespace cribsim
