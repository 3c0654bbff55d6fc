#pragma once

#include <vector>

#include "cribsim/profile.hpp"
#include "cribsim/types.hpp"

namespace cribsim {

enum class BlochMode { Weak, Full };

/// Atomic state for every (z node, frequency class). The optical coherences
/// sigma13 and sigma23 are split into forward and backward envelope
/// components; the optical carrier is never represented. In weak mode the
/// populations are implicit (sigma33 = 1); full mode carries the populations
/// and the two-photon coherence sigma12 as well.
///
/// Cells are indexed by z*n_classes + n; no two cells alias, so per-class
/// updates are safe to run in parallel.
struct EnsembleState {
    BlochMode mode = BlochMode::Weak;
    int n_z = 0;        // number of z nodes
    int n_classes = 0;

    // evolution detunings; negated by reverse_detunings, class binding preserved
    std::vector<double> detunings;
    std::vector<double> weights;

    bool reversed = false;
    bool phase_matched = false;

    std::vector<cplx> s13_f, s13_b;
    std::vector<cplx> s23_f, s23_b;

    // full mode only
    std::vector<double> p11, p22, p33;
    std::vector<cplx> s12;

    std::size_t cell(int z, int n) const {
        return static_cast<std::size_t>(z) * n_classes + n;
    }
    std::size_t cells() const { return static_cast<std::size_t>(n_z) * n_classes; }

    std::vector<cplx>& sigma13(Direction d) { return d == Direction::Forward ? s13_f : s13_b; }
    std::vector<cplx>& sigma23(Direction d) { return d == Direction::Forward ? s23_f : s23_b; }
    const std::vector<cplx>& sigma13(Direction d) const {
        return d == Direction::Forward ? s13_f : s13_b;
    }
    const std::vector<cplx>& sigma23(Direction d) const {
        return d == Direction::Forward ? s23_f : s23_b;
    }
};

/// All atoms in the ground level: coherences zero, and in full mode
/// sigma33 = 1 at every (z, class).
EnsembleState init_ground_state(int n_z, const DetuningGrid& grid, BlochMode mode);

}  // namespace cribsim
