#include "cribsim/phase_noise.hpp"

#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cribsim/bessel.hpp"

namespace cribsim {

namespace {

constexpr double kAnalyticCap = 1e6;  // k values above this are already 1 - 5e-7

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

double von_mises_pdf(double phi, double k) {
    if (k < 0.0) throw ConfigError("von Mises inverse width k must be non-negative");
    // exp(k cos phi - k) / (2 pi e^{-k} I0(k)) avoids overflow at large k
    return std::exp(k * (std::cos(phi) - 1.0)) /
           (2.0 * std::numbers::pi * bessel_i0_scaled(k));
}

double sample_von_mises(double k, std::mt19937_64& rng) {
    if (k < 0.0) throw ConfigError("von Mises inverse width k must be non-negative");
    if (k < 1e-8) return std::numbers::pi * (2.0 * uniform01(rng) - 1.0);

    // Best-Fisher rejection against a wrapped Cauchy envelope
    double s;
    if (k < 1e-5) {
        s = 1.0 / k + k;
    } else {
        const double r = 1.0 + std::sqrt(1.0 + 4.0 * k * k);
        const double rho = (r - std::sqrt(2.0 * r)) / (2.0 * k);
        s = (1.0 + rho * rho) / (2.0 * rho);
    }
    double w;
    for (;;) {
        const double u1 = uniform01(rng);
        const double z = std::cos(std::numbers::pi * u1);
        w = (1.0 + s * z) / (s + z);
        const double y = k * (s - w);
        const double u2 = uniform01(rng);
        if (y * (2.0 - y) - u2 >= 0.0) break;
        if (u2 > 0.0 && std::log(y / u2) + 1.0 - y >= 0.0) break;
    }
    const double phi = std::acos(std::clamp(w, -1.0, 1.0));
    return uniform01(rng) < 0.5 ? -phi : phi;
}

double dephasing_factor(double k) {
    if (k < 0.0) throw ConfigError("von Mises inverse width k must be non-negative");
    if (std::isinf(k)) return 1.0;
    if (k == 0.0) return 0.0;
    return bessel_i1_scaled(k) / bessel_i0_scaled(k);
}

void apply_level_phases(EnsembleState& ens, const LevelPhases& phases) {
    const cplx m13 = std::polar(1.0, phases.phi1 - phases.phi3);
    const cplx m23 = std::polar(1.0, phases.phi2 - phases.phi3);
    for (auto& v : ens.s13_f) v *= m13;
    for (auto& v : ens.s13_b) v *= m13;
    for (auto& v : ens.s23_f) v *= m23;
    for (auto& v : ens.s23_b) v *= m23;
    if (ens.mode == BlochMode::Full) {
        const cplx m12 = std::polar(1.0, phases.phi1 - phases.phi2);
        for (auto& v : ens.s12) v *= m12;
    }
}

std::uint64_t cell_stream_seed(std::uint64_t seed, int z_index, int class_index) {
    std::uint64_t h = splitmix64(seed ^ 0xA5A5A5A55A5A5A5AULL);
    h = splitmix64(h + static_cast<std::uint64_t>(z_index));
    h = splitmix64(h + static_cast<std::uint64_t>(class_index));
    return h;
}

void apply_phase_noise(EnsembleState& ens, const NoiseParams& params) {
    if (params.n_samples < 1) throw ConfigError("noise n_samples must be at least 1");
    if (!params.enabled()) return;

    if (params.mode == NoiseMode::Analytic) {
        auto factor = [](double k) {
            return std::isinf(k) ? 1.0 : dephasing_factor(std::min(k, kAnalyticCap));
        };
        const double k1 = factor(params.k1);
        const double k2 = factor(params.k2);
        const double k3 = factor(params.k3);
        const double m13 = k1 * k3;
        const double m23 = k2 * k3;
        if (m13 != 1.0) {
            for (auto& v : ens.s13_f) v *= m13;
            for (auto& v : ens.s13_b) v *= m13;
        }
        if (m23 != 1.0) {
            for (auto& v : ens.s23_f) v *= m23;
            for (auto& v : ens.s23_b) v *= m23;
        }
        if (ens.mode == BlochMode::Full) {
            const double m12 = k1 * k2;
            if (m12 != 1.0)
                for (auto& v : ens.s12) v *= m12;
        }
        return;
    }

    const bool f1 = std::isfinite(params.k1);
    const bool f2 = std::isfinite(params.k2);
    const bool f3 = std::isfinite(params.k3);
    const long n = params.n_samples;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (int z = 0; z < ens.n_z; ++z) {
        for (int c = 0; c < ens.n_classes; ++c) {
            std::mt19937_64 rng(cell_stream_seed(params.seed, z, c));
            cplx sum13{}, sum23{}, sum12{};
            for (long j = 0; j < n; ++j) {
                const double p1 = f1 ? sample_von_mises(params.k1, rng) : 0.0;
                const double p2 = f2 ? sample_von_mises(params.k2, rng) : 0.0;
                const double p3 = f3 ? sample_von_mises(params.k3, rng) : 0.0;
                sum13 += std::polar(1.0, p1 - p3);
                sum23 += std::polar(1.0, p2 - p3);
                if (ens.mode == BlochMode::Full) sum12 += std::polar(1.0, p1 - p2);
            }
            const cplx m13 = sum13 / static_cast<double>(n);
            const cplx m23 = sum23 / static_cast<double>(n);
            const std::size_t i = ens.cell(z, c);
            ens.s13_f[i] *= m13;
            ens.s13_b[i] *= m13;
            ens.s23_f[i] *= m23;
            ens.s23_b[i] *= m23;
            if (ens.mode == BlochMode::Full) ens.s12[i] *= sum12 / static_cast<double>(n);
        }
    }
}

}  // namespace cribsim
