#include "cribsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cribsim {

namespace {

std::vector<cplx> dft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx w = std::polar(1.0, step * static_cast<double>(k));
        cplx acc{};
        cplx phase(1.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            acc += x[j] * phase;
            phase *= w;
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace

double spectral_energy(const std::vector<cplx>& series, double dt) {
    if (series.empty()) throw ConfigError("spectral_energy: empty series");
    const auto bins = dft(series);
    // domega = 2 pi / (N dt); spectral bin amplitude = dt * DFT bin
    const double n = static_cast<double>(series.size());
    double sum = 0.0;
    for (const cplx& b : bins) sum += std::norm(b);
    return sum * dt / n;
}

double time_energy(const std::vector<cplx>& series, double dt) {
    double sum = 0.0;
    for (const cplx& v : series) sum += std::norm(v);
    return sum * dt;
}

double efficiency(const std::vector<cplx>& input, const std::vector<cplx>& output, double dt) {
    const double ein = spectral_energy(input, dt);
    if (ein <= 0.0) throw ConfigError("efficiency: zero input energy");
    return spectral_energy(output, dt) / ein;
}

std::pair<Grid2D<double>, Grid2D<double>> normalized_intensity(const StageRecord& record,
                                                               double input_peak_intensity) {
    if (input_peak_intensity <= 0.0)
        throw ConfigError("normalized_intensity: zero input peak intensity");
    Grid2D<double> i13(record.omega13.rows(), record.omega13.cols());
    Grid2D<double> i23(record.omega23.rows(), record.omega23.cols());
    for (std::size_t i = 0; i < record.omega13.data().size(); ++i) {
        i13.data()[i] = std::norm(record.omega13.data()[i]) / input_peak_intensity;
        i23.data()[i] = std::norm(record.omega23.data()[i]) / input_peak_intensity;
    }
    return {std::move(i13), std::move(i23)};
}

bool weak_field_check(double max_p11, double max_p22, double max_s12, double threshold) {
    return max_p11 <= threshold && max_p22 <= threshold && max_s12 <= threshold;
}

QubitFidelity qubit_fidelity(const QubitState& input, cplx t_left, cplx t_right) {
    if (t_left == cplx{} && t_right == cplx{})
        throw ConfigError("qubit_fidelity: both transfer coefficients vanish");
    const cplx out_l = t_left * input.c_left;
    const cplx out_r = t_right * input.c_right;
    QubitFidelity f;
    f.efficiency = std::norm(out_l) + std::norm(out_r);
    const cplx overlap = std::conj(input.c_left) * out_l + std::conj(input.c_right) * out_r;
    f.conditional = std::norm(overlap) / f.efficiency;
    f.unconditional = f.efficiency * f.conditional;
    return f;
}

QubitTransfer extract_transfer(const std::vector<cplx>& in13, const std::vector<cplx>& in23,
                               const std::vector<cplx>& out13, const std::vector<cplx>& out23,
                               double dt) {
    auto zero_bin = [dt](const std::vector<cplx>& s) {
        cplx acc{};
        for (const cplx& v : s) acc += v;
        return acc * dt;
    };
    QubitTransfer t;
    const cplx i13 = zero_bin(in13), i23 = zero_bin(in23);
    t.t_left = i13 == cplx{} ? cplx{} : zero_bin(out13) / i13;
    t.t_right = i23 == cplx{} ? cplx{} : zero_bin(out23) / i23;
    return t;
}

double intensity_cross_correlation(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    std::vector<double> ia(na), ib(nb);
    double ea = 0.0, eb = 0.0;
    for (int i = 0; i < na; ++i) {
        ia[i] = std::norm(a[i]);
        ea += ia[i] * ia[i];
    }
    for (int i = 0; i < nb; ++i) {
        ib[i] = std::norm(b[i]);
        eb += ib[i] * ib[i];
    }
    if (ea == 0.0 || eb == 0.0) return 0.0;
    double best = 0.0;
    for (int lag = -(nb - 1); lag < na; ++lag) {
        double dot = 0.0;
        const int lo = std::max(0, lag);
        const int hi = std::min(na, nb + lag);
        for (int i = lo; i < hi; ++i) dot += ia[i] * ib[i - lag];
        best = std::max(best, dot);
    }
    return best / std::sqrt(ea * eb);
}

}  // namespace cribsim
