#include "cribsim/ensemble.hpp"

namespace cribsim {

EnsembleState init_ground_state(int n_z, const DetuningGrid& grid, BlochMode mode) {
    if (n_z < 2) throw ConfigError("n_z must be at least 2");
    EnsembleState ens;
    ens.mode = mode;
    ens.n_z = n_z;
    ens.n_classes = grid.size();
    ens.detunings = grid.detunings;
    ens.weights = grid.weights;
    const std::size_t n = ens.cells();
    ens.s13_f.assign(n, cplx{});
    ens.s13_b.assign(n, cplx{});
    ens.s23_f.assign(n, cplx{});
    ens.s23_b.assign(n, cplx{});
    if (mode == BlochMode::Full) {
        ens.p11.assign(n, 0.0);
        ens.p22.assign(n, 0.0);
        ens.p33.assign(n, 1.0);
        ens.s12.assign(n, cplx{});
    }
    return ens;
}

}  // namespace cribsim
