#include "cribsim/bloch.hpp"

namespace cribsim {

cplx closed_form_constant_drive(cplx omega, double delta, double t) {
    if (delta == 0.0) return cplx(0.0, -1.0) * omega * t;
    return (omega / delta) * (1.0 - std::polar(1.0, delta * t));
}

void rk4_step(EnsembleState& ens, int z_index, Direction dir, const FieldSample& f0,
              const FieldSample& fh, const FieldSample& f1, double dt) {
    auto& s13 = ens.sigma13(dir);
    auto& s23 = ens.sigma23(dir);
    const std::size_t base = ens.cell(z_index, 0);
    if (ens.mode == BlochMode::Weak) {
        for (int n = 0; n < ens.n_classes; ++n)
            rk4_step_class(s13[base + n], s23[base + n], ens.detunings[n], f0, fh, f1, dt);
    } else {
        for (int n = 0; n < ens.n_classes; ++n) {
            FullState st;
            st.p11 = ens.p11[base + n];
            st.p22 = ens.p22[base + n];
            st.p33 = ens.p33[base + n];
            st.s12 = ens.s12[base + n];
            st.s13 = s13[base + n];
            st.s23 = s23[base + n];
            rk4_step_class(st, ens.detunings[n], f0, fh, f1, dt);
            ens.p11[base + n] = st.p11;
            ens.p22[base + n] = st.p22;
            ens.p33[base + n] = st.p33;
            ens.s12[base + n] = st.s12;
            s13[base + n] = st.s13;
            s23[base + n] = st.s23;
        }
    }
}

}  // namespace cribsim
