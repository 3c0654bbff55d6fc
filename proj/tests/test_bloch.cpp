#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cribsim/bloch.hpp"
#include "cribsim/profile.hpp"

using namespace cribsim;

namespace {

// integrate one class over [0, t_end] with a time-dependent field
cplx integrate_weak(cplx s13, double delta, const std::vector<FieldSample>& field, double dt) {
    cplx s23{};
    for (std::size_t j = 0; j + 1 < field.size(); ++j) {
        const FieldSample fh{0.5 * (field[j].omega13 + field[j + 1].omega13),
                             0.5 * (field[j].omega23 + field[j + 1].omega23)};
        rk4_step_class(s13, s23, delta, field[j], fh, field[j + 1], dt);
    }
    return s13;
}

std::vector<FieldSample> constant_field(cplx omega13, int n) {
    return std::vector<FieldSample>(n, FieldSample{omega13, 0.0});
}

}  // namespace

TEST_SUITE("weak-field dynamics") {

TEST_CASE("resonant linear drive") {
    const auto [d13, d23] = weak_coherence_derivative({}, {}, {cplx(1e-3, 0.0), {}}, 0.0);
    CHECK(d13 == cplx(0.0, -1e-3));
    CHECK(d23 == cplx{});
}

TEST_CASE("free rotation") {
    const auto [d13, d23] = weak_coherence_derivative(cplx(0.0, 1.0), {}, {}, 2.0);
    CHECK(d13 == cplx(-2.0, 0.0));
    CHECK(d23 == cplx{});
}

TEST_CASE("closed-form constant drive values") {
    CHECK(std::abs(closed_form_constant_drive(1e-3, 0.0, 10.0) - cplx(0.0, -1e-2)) < 1e-16);
    CHECK(std::abs(closed_form_constant_drive(1e-3, 1.0, 2.0 * std::numbers::pi)) < 1e-15);
    CHECK(std::abs(closed_form_constant_drive(1e-3, 1.0, std::numbers::pi) - cplx(2e-3, 0.0)) <
          1e-15);
}

TEST_CASE("rk4 reproduces the constant-drive oracle to 1e-10") {
    const double dt = 0.01;
    const int steps = static_cast<int>(std::lround(std::numbers::pi / dt));
    const cplx got = integrate_weak({}, 1.0, constant_field(1e-3, steps + 1), dt);
    CHECK(std::abs(got - closed_form_constant_drive(1e-3, 1.0, steps * dt)) < 1e-10);
}

TEST_CASE("free evolution preserves the coherence magnitude") {
    const double dt = 0.02;
    const double delta = 1.0;
    cplx s13(1e-3, 0.0), s23{};
    const std::vector<FieldSample> zero(501);
    for (int j = 0; j < 500; ++j) rk4_step_class(s13, s23, delta, zero[j], zero[j], zero[j + 1], dt);
    CHECK(std::abs(std::abs(s13) - 1e-3) < 1e-12);
    // phase advances as exp(i delta t) up to the rk4 truncation of the rotation
    CHECK(std::abs(s13 - cplx(1e-3, 0.0) * std::polar(1.0, delta * 500 * dt)) < 1e-8);
}

TEST_CASE("halving dt gains a factor of at least 14 against the oracle") {
    const double t_end = std::numbers::pi;
    auto error_at = [&](double dt) {
        const int steps = static_cast<int>(std::lround(t_end / dt));
        const cplx got = integrate_weak({}, 2.0, constant_field(1e-3, steps + 1), dt);
        return std::abs(got - closed_form_constant_drive(1e-3, 2.0, steps * dt));
    };
    const double coarse = error_at(0.05);
    const double fine = error_at(0.025);
    CHECK(coarse / fine >= 14.0);
}

TEST_CASE("evolution is linear in the field") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<FieldSample> field(301);
    for (auto& f : field) f = {1e-3 * cplx(u(rng), u(rng)), 1e-3 * cplx(u(rng), u(rng))};
    for (const cplx lambda : {cplx(2.0, 0.0), cplx(0.0, 0.5), cplx(-3.0, 0.2)}) {
        std::vector<FieldSample> scaled(field.size());
        for (std::size_t j = 0; j < field.size(); ++j)
            scaled[j] = {lambda * field[j].omega13, lambda * field[j].omega23};
        const cplx base = integrate_weak({}, 1.3, field, 0.02);
        const cplx big = integrate_weak({}, 1.3, scaled, 0.02);
        CHECK(std::abs(big - lambda * base) <= 1e-12 * std::abs(big) + 1e-18);
    }
}

TEST_CASE("channels are decoupled bit for bit") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<FieldSample> with23(201), without23(201);
    for (std::size_t j = 0; j < with23.size(); ++j) {
        const cplx o13 = 1e-3 * cplx(u(rng), u(rng));
        with23[j] = {o13, 1e-3 * cplx(u(rng), u(rng))};
        without23[j] = {o13, {}};
    }
    cplx a13{}, a23{}, b13{}, b23{};
    for (std::size_t j = 0; j + 1 < with23.size(); ++j) {
        const FieldSample ha{0.5 * (with23[j].omega13 + with23[j + 1].omega13),
                             0.5 * (with23[j].omega23 + with23[j + 1].omega23)};
        const FieldSample hb{ha.omega13, {}};
        rk4_step_class(a13, a23, 0.7, with23[j], ha, with23[j + 1], 0.02);
        rk4_step_class(b13, b23, 0.7, without23[j], hb, without23[j + 1], 0.02);
        REQUIRE(a13 == b13);
    }
}

}  // TEST_SUITE

TEST_SUITE("full three-level dynamics") {

TEST_CASE("ground state with no field is stationary") {
    const FullState d = full_bloch_derivative({}, {}, 0.5);
    CHECK(d.p11 == 0.0);
    CHECK(d.p22 == 0.0);
    CHECK(d.p33 == 0.0);
    CHECK(d.s12 == cplx{});
    CHECK(d.s13 == cplx{});
    CHECK(d.s23 == cplx{});
}

TEST_CASE("resonant drive sign convention from the ground state") {
    const FullState d = full_bloch_derivative({}, {cplx(1e-3, 0.0), {}}, 0.0);
    CHECK(d.s13 == cplx(0.0, -1e-3));
    CHECK(d.s23 == cplx{});
}

TEST_CASE("population trace derivative cancels exactly") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        FullState s;
        s.p11 = 1e-6 * std::abs(u(rng));
        s.p22 = 1e-6 * std::abs(u(rng));
        s.p33 = 1.0 - s.p11 - s.p22;
        s.s12 = 1e-6 * cplx(u(rng), u(rng));
        s.s13 = 1e-3 * cplx(u(rng), u(rng));
        s.s23 = 1e-3 * cplx(u(rng), u(rng));
        const FieldSample f{1e-3 * cplx(u(rng), u(rng)), 1e-3 * cplx(u(rng), u(rng))};
        const FullState d = full_bloch_derivative(s, f, u(rng));
        CHECK(d.p11 + d.p22 + d.p33 == 0.0);
    }
}

TEST_CASE("trace stays within 1e-8 and weak mode tracks full mode") {
    // one class driven by a weak Gaussian pulse
    const double dt = 0.02;
    const int n = 1001;
    std::vector<FieldSample> field(n);
    for (int j = 0; j < n; ++j) {
        const double t = -10.0 + j * dt;
        const double g = 1e-3 * std::exp(-0.5 * t * t);
        field[j] = {std::sqrt(0.6) * g, std::sqrt(0.4) * g};
    }
    FullState full;
    cplx w13{}, w23{};
    double worst_trace = 0.0;
    std::vector<cplx> hist_full, hist_weak;
    for (int j = 0; j + 1 < n; ++j) {
        const FieldSample fh{0.5 * (field[j].omega13 + field[j + 1].omega13),
                             0.5 * (field[j].omega23 + field[j + 1].omega23)};
        rk4_step_class(full, 0.4, field[j], fh, field[j + 1], dt);
        rk4_step_class(w13, w23, 0.4, field[j], fh, field[j + 1], dt);
        worst_trace = std::max(worst_trace, std::abs(full.p11 + full.p22 + full.p33 - 1.0));
        hist_full.push_back(full.s13);
        hist_weak.push_back(w13);
    }
    CHECK(worst_trace <= 1e-8);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < hist_full.size(); ++j) {
        num += std::norm(hist_full[j] - hist_weak[j]);
        den += std::norm(hist_full[j]);
    }
    CHECK(std::sqrt(num / den) <= 1e-4);
}

}  // TEST_SUITE
