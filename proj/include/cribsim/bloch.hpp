#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "cribsim/ensemble.hpp"
#include "cribsim/types.hpp"

namespace cribsim {

/// Rabi-frequency envelope pair of one propagation direction at one (z, t).
struct FieldSample {
    cplx omega13{};
    cplx omega23{};
};

/// Phases acquired by the atomic levels during storage; coherences transform
/// as sigma_ij -> exp(i(phi_i - phi_j)) sigma_ij.
struct LevelPhases {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double phi3 = 0.0;

    bool trivial() const { return phi1 == 0.0 && phi2 == 0.0 && phi3 == 0.0; }
};

namespace detail {

// i*(delta*s - omega)
inline cplx weak_rhs(cplx s, cplx omega, double delta) {
    const cplx u = delta * s - omega;
    return {-u.imag(), u.real()};
}

}  // namespace detail

/// Weak-field coherence equations, d(sigma_mu3)/dt = i*delta*sigma_mu3 - i*omega_mu3.
/// With the populations frozen and sigma12 = 0 the two channels decouple.
inline std::pair<cplx, cplx> weak_coherence_derivative(cplx s13, cplx s23,
                                                       const FieldSample& field, double delta) {
    return {detail::weak_rhs(s13, field.omega13, delta),
            detail::weak_rhs(s23, field.omega23, delta)};
}

/// Per-class density-matrix block in full mode (upper triangle stored).
struct FullState {
    double p11 = 0.0;
    double p22 = 0.0;
    double p33 = 1.0;
    cplx s12{};
    cplx s13{};
    cplx s23{};
};

/// Full three-level equations in the rotating frame. The excited levels are
/// degenerate (omega12 = 0) so sigma12 carries no free rotation; sigma33
/// evolves by closure of the V system, which conserves the trace exactly.
inline FullState full_bloch_derivative(const FullState& s, const FieldSample& field,
                                       double delta) {
    const cplx I(0.0, 1.0);
    FullState d;
    const double flow13 = -2.0 * std::imag(s.s13 * std::conj(field.omega13));
    const double flow23 = -2.0 * std::imag(s.s23 * std::conj(field.omega23));
    d.p11 = flow13;
    d.p22 = flow23;
    d.p33 = -flow13 - flow23;
    d.s12 = I * (s.s13 * std::conj(field.omega23) - std::conj(s.s23) * field.omega13);
    d.s13 = I * (delta * s.s13 + s.s12 * field.omega23 - (s.p33 - s.p11) * field.omega13);
    d.s23 =
        I * (delta * s.s23 + std::conj(s.s12) * field.omega13 - (s.p33 - s.p22) * field.omega23);
    return d;
}

/// Coherence of one class under constant drive from sigma(0) = 0, the
/// integration oracle: (omega/delta)(1 - exp(i*delta*t)), with the
/// delta -> 0 limit -i*omega*t.
cplx closed_form_constant_drive(cplx omega, double delta, double t);

/// Classical RK4 update of one class by dt. Field samples are taken at t,
/// t + dt/2 (midpoint interpolation of the stored series) and t + dt.
inline void rk4_step_class(cplx& s13, cplx& s23, double delta, const FieldSample& f0,
                           const FieldSample& fh, const FieldSample& f1, double dt) {
    using detail::weak_rhs;
    const double h2 = 0.5 * dt;
    const double h6 = dt / 6.0;

    cplx k1 = weak_rhs(s13, f0.omega13, delta);
    cplx k2 = weak_rhs(s13 + h2 * k1, fh.omega13, delta);
    cplx k3 = weak_rhs(s13 + h2 * k2, fh.omega13, delta);
    cplx k4 = weak_rhs(s13 + dt * k3, f1.omega13, delta);
    s13 += h6 * (k1 + 2.0 * (k2 + k3) + k4);

    k1 = weak_rhs(s23, f0.omega23, delta);
    k2 = weak_rhs(s23 + h2 * k1, fh.omega23, delta);
    k3 = weak_rhs(s23 + h2 * k2, fh.omega23, delta);
    k4 = weak_rhs(s23 + dt * k3, f1.omega23, delta);
    s23 += h6 * (k1 + 2.0 * (k2 + k3) + k4);
}

namespace detail {

inline FullState axpy(const FullState& s, double h, const FullState& d) {
    FullState r;
    r.p11 = s.p11 + h * d.p11;
    r.p22 = s.p22 + h * d.p22;
    r.p33 = s.p33 + h * d.p33;
    r.s12 = s.s12 + h * d.s12;
    r.s13 = s.s13 + h * d.s13;
    r.s23 = s.s23 + h * d.s23;
    return r;
}

}  // namespace detail

inline void rk4_step_class(FullState& s, double delta, const FieldSample& f0,
                           const FieldSample& fh, const FieldSample& f1, double dt) {
    const FullState k1 = full_bloch_derivative(s, f0, delta);
    const FullState k2 = full_bloch_derivative(detail::axpy(s, 0.5 * dt, k1), fh, delta);
    const FullState k3 = full_bloch_derivative(detail::axpy(s, 0.5 * dt, k2), fh, delta);
    const FullState k4 = full_bloch_derivative(detail::axpy(s, dt, k3), f1, delta);
    const double h6 = dt / 6.0;
    s.p11 += h6 * (k1.p11 + 2.0 * (k2.p11 + k3.p11) + k4.p11);
    s.p22 += h6 * (k1.p22 + 2.0 * (k2.p22 + k3.p22) + k4.p22);
    s.p33 += h6 * (k1.p33 + 2.0 * (k2.p33 + k3.p33) + k4.p33);
    s.s12 += h6 * (k1.s12 + 2.0 * (k2.s12 + k3.s12) + k4.s12);
    s.s13 += h6 * (k1.s13 + 2.0 * (k2.s13 + k3.s13) + k4.s13);
    s.s23 += h6 * (k1.s23 + 2.0 * (k2.s23 + k3.s23) + k4.s23);
}

/// RK4 update of a whole fixed-z slice of the ensemble, every class advanced
/// independently. Requires dt*max|delta| <= 0.5 for accuracy headroom.
void rk4_step(EnsembleState& ens, int z_index, Direction dir, const FieldSample& f0,
              const FieldSample& fh, const FieldSample& f1, double dt);

}  // namespace cribsim
