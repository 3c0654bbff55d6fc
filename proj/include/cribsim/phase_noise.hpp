#pragma once

#include <cstdint>
#include <random>

#include "cribsim/bloch.hpp"
#include "cribsim/ensemble.hpp"
#include "cribsim/types.hpp"

namespace cribsim {

enum class NoiseMode { Analytic, MonteCarlo };

/// Von Mises phase noise applied to the stored ensemble at the start of
/// retrieval. k_j is the inverse width for level j; k = infinity means the
/// level is noise free.
struct NoiseParams {
    double k1 = std::numeric_limits<double>::infinity();
    double k2 = std::numeric_limits<double>::infinity();
    double k3 = std::numeric_limits<double>::infinity();
    NoiseMode mode = NoiseMode::Analytic;
    long n_samples = 10000;
    std::uint64_t seed = 12345;

    bool enabled() const {
        return std::isfinite(k1) || std::isfinite(k2) || std::isfinite(k3);
    }
};

/// Von Mises density exp(k cos(phi)) / (2 pi I0(k)), stable for large k.
double von_mises_pdf(double phi, double k);

/// Best-Fisher rejection sampling of the von Mises distribution centered at
/// zero. k = 0 degenerates to the uniform distribution on [-pi, pi]. Uniform
/// variates are drawn from the engine bits directly so a fixed seed gives an
/// identical stream on every run and thread count.
double sample_von_mises(double k, std::mt19937_64& rng);

/// First circular moment K(k) = I1(k)/I0(k), the coherence left after
/// averaging exp(i phi) over the distribution. Monotone from 0 to 1.
double dephasing_factor(double k);

/// Deterministic level phases: sigma_mu3 <- exp(i(phi_mu - phi_3)) sigma_mu3
/// uniformly over all z and classes (full mode also transforms sigma12).
void apply_level_phases(EnsembleState& ens, const LevelPhases& phases);

/// Phase noise applied once per cell. Analytic mode multiplies sigma_mu3 by
/// K(k_mu)K(k_3); Monte Carlo mode multiplies by the empirical mean of
/// exp(i(phi_mu - phi_3)) over n_samples draws, with an independent stream
/// per (z, class) derived from (seed, z, class).
void apply_phase_noise(EnsembleState& ens, const NoiseParams& params);

/// Stream seed for one (z, class) cell; exposed for tests.
std::uint64_t cell_stream_seed(std::uint64_t seed, int z_index, int class_index);

}  // namespace cribsim
