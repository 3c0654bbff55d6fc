#include "cribsim/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cribsim/analytic.hpp"
#include "cribsim/bloch.hpp"
#include "cribsim/metrics.hpp"
#include "cribsim/phase_noise.hpp"
#include "cribsim/runner.hpp"
#include "cribsim/sweep.hpp"

namespace cribsim {

namespace {

constexpr double kBackwardIdeal45 = 0.977905416727602;   // (1 - e^{-4.5})^2
constexpr double kForwardIdealMax = 0.541341132946451;   // (2/e)^2
constexpr double kKFactor5 = 0.8933831370440852;         // I1(5)/I0(5)

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

CriterionResult make(int id, std::string name, bool pass, std::string detail) {
    return {id, std::move(name), pass, std::move(detail)};
}

void emit(const AcceptanceOptions& opt, const CriterionResult& r) {
    if (opt.progress)
        *opt.progress << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": "
                      << r.detail << std::endl;
}

double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den == 0.0 ? 0.0 : std::sqrt(num / den);
}

// --- C10 oracles ----------------------------------------------------------

// Independent long-double power-series evaluation of I1/I0.
double k_factor_series_oracle(double k) {
    const long double q = 0.25L * static_cast<long double>(k) * k;
    long double t0 = 1.0L, s0 = 1.0L;
    long double t1 = 0.5L * k, s1 = t1;
    for (int m = 1; m < 400; ++m) {
        t0 *= q / (static_cast<long double>(m) * m);
        t1 *= q / (static_cast<long double>(m) * (m + 1));
        s0 += t0;
        s1 += t1;
        if (t0 < s0 * 1e-22L && t1 < s1 * 1e-22L) break;
    }
    return static_cast<double>(s1 / s0);
}

// Regulated numerical quadrature of the response integrals: the inner
// half-line time integral is damped by exp(-eps*t), the remaining frequency
// integral is evaluated by Simpson's rule, and eps -> 0 by Richardson
// extrapolation over (eps, eps/2, eps/4).
template <typename F>
cplx richardson_eps(F&& eval, double eps) {
    const cplx a0 = eval(eps);
    const cplx a1 = eval(eps / 2.0);
    const cplx a2 = eval(eps / 4.0);
    const cplx r1 = 2.0 * a1 - a0;
    const cplx r2 = 2.0 * a2 - a1;
    return (4.0 * r2 - r1) / 3.0;
}

template <typename F>
cplx simpson(F&& f, double a, double b, int n) {  // n even
    const double h = (b - a) / n;
    cplx sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * (h / 3.0);
}

cplx response_H_quadrature(double omega, const InhomogeneousProfile& profile) {
    const double gamma = profile.half_width;
    return richardson_eps(
        [&](double eps) {
            const int n = 2 * static_cast<int>(std::ceil(2.0 * gamma / (eps / 20.0) / 2.0));
            return simpson(
                [&](double d) {
                    return profile.density(d) / cplx(eps, -(omega + d));
                },
                -gamma, gamma, n);
        },
        2e-3 * gamma);
}

cplx response_F_quadrature(double omega, const InhomogeneousProfile& profile) {
    const double gamma = profile.half_width;
    return richardson_eps(
        [&](double eps) {
            const int n = 2 * static_cast<int>(std::ceil(2.0 * gamma / (eps / 20.0) / 2.0));
            return simpson(
                [&](double d) {
                    return profile.density(-d) / cplx(eps, -(omega - d));
                },
                -gamma, gamma, n);
        },
        2e-3 * gamma);
}

double response_J_quadrature(double omega, const InhomogeneousProfile& profile) {
    const double gamma = profile.half_width;
    const cplx v = richardson_eps(
        [&](double eps) {
            const int n = 2 * static_cast<int>(std::ceil(2.0 * gamma / (eps / 20.0) / 2.0));
            return simpson(
                [&](double d) {
                    const double x = omega - d;
                    return cplx(profile.density(-d) * 2.0 * eps / (eps * eps + x * x), 0.0);
                },
                -gamma, gamma, n);
        },
        1e-3 * gamma);
    return v.real();
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const RunSpec& base_in, const AcceptanceOptions& opt) {
    using clock = std::chrono::steady_clock;
    std::vector<CriterionResult> results;

    RunSpec base = base_in;
    base.output.write_grids = false;
    base.medium.optical_depth = 4.5;
    base.protocol.direction = Direction::Backward;
    base.protocol.phase_matching = PhaseMatchingOption::Auto;
    base.phases = {};
    base.noise.k1 = base.noise.k2 = base.noise.k3 = std::numeric_limits<double>::infinity();
    base.noise.mode = NoiseMode::Analytic;
    validate_spec(base);

    auto with = [&](auto&& mutate) {
        RunSpec s = base;
        mutate(s);
        validate_spec(s);
        return s;
    };

    const RunSpec spec_noisy_b = with([](RunSpec& s) { s.noise.k3 = 5.0; });
    const RunSpec spec_noisy_f = with([](RunSpec& s) {
        s.noise.k3 = 5.0;
        s.protocol.direction = Direction::Forward;
    });
    const RunSpec spec_clean_b = base;

    // ---- criterion 1: noisy backward efficiency + runtime ----------------
    const auto t0 = clock::now();
    const AbsorbedMedium m45 = absorb(base);
    const RunResult r1 = finish_protocol(m45, spec_noisy_b);
    const double c1_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    {
        const double lo = 0.76, hi = 0.80;
        const bool eff_ok = r1.eff13.exit_face >= lo && r1.eff13.exit_face <= hi &&
                            r1.eff23.exit_face >= lo && r1.eff23.exit_face <= hi;
        const bool time_ok = c1_seconds < 60.0;
        results.push_back(make(
            1, "noisy backward efficiency (optical depth 4.5, k3 = 5)", eff_ok && time_ok,
            "eff13 = " + fmt(r1.eff13.exit_face) + ", eff23 = " + fmt(r1.eff23.exit_face) +
                " in [0.76, 0.80], analytic 0.780; runtime under 60 s: " +
                (time_ok ? "yes" : "no")));
        emit(opt, results.back());
        if (opt.progress) *opt.progress << "  (criterion 1 runtime: " << fmt(c1_seconds) << " s)"
                                        << std::endl;
    }

    // ---- criterion 2: noisy forward max-over-depth efficiency ------------
    const RunResult r2 = finish_protocol(m45, spec_noisy_f);
    {
        const bool ok = r2.eff13.max_over_z >= 0.41 && r2.eff13.max_over_z <= 0.45 &&
                        r2.eff23.max_over_z >= 0.41 && r2.eff23.max_over_z <= 0.45;
        results.push_back(make(2, "noisy forward max-over-depth efficiency", ok,
                               "eff13 = " + fmt(r2.eff13.max_over_z) + ", eff23 = " +
                                   fmt(r2.eff23.max_over_z) + " in [0.41, 0.45], analytic 0.432"));
        emit(opt, results.back());
    }

    // ---- criterion 3: forward 54% bound over the depth axis ---------------
    const std::vector<double> c3_depths = {1.0, 1.5, 1.8, 1.9, 2.0, 2.1, 2.2, 2.5, 3.0};
    const RunSpec spec_fwd_clean = with([](RunSpec& s) { s.protocol.direction = Direction::Forward; });
    double c3_max = 0.0, c3_arg = 0.0;
    {
        const auto rows = run_sweep(spec_fwd_clean, c3_depths,
                                    {std::numeric_limits<double>::infinity()});
        for (const SweepRow& row : rows)
            if (row.eff13_exit > c3_max) {
                c3_max = row.eff13_exit;
                c3_arg = row.optical_depth;
            }
        const bool ok = std::abs(c3_max - 0.541) <= 0.015 && std::abs(c3_arg - 2.0) <= 0.1;
        results.push_back(make(3, "forward sweep maximum near 54% at depth 2", ok,
                               "max eff = " + fmt(c3_max) + " (target 0.541 +- 0.015) at depth " +
                                   fmt(c3_arg) + " (target 2.0 +- 0.1)"));
        emit(opt, results.back());
    }

    // ---- criterion 4: ideal backward recovery -----------------------------
    const RunResult r4 = finish_protocol(m45, spec_clean_b);
    double c4_xcorr;
    {
        auto in13 = r4.absorption.series13(0);
        std::reverse(in13.begin(), in13.end());
        c4_xcorr = intensity_cross_correlation(r4.retrieval.series13(r4.retrieval.exit_node()),
                                               in13);
        const bool ok = std::abs(r4.eff13.exit_face - 0.978) <= 0.02 &&
                        std::abs(r4.eff23.exit_face - 0.978) <= 0.02 && c4_xcorr >= 0.99;
        results.push_back(make(4, "ideal backward recovery and time reversal", ok,
                               "eff13 = " + fmt(r4.eff13.exit_face) + ", eff23 = " +
                                   fmt(r4.eff23.exit_face) + " (target 0.978 +- 0.02), "
                                   "time-reversed cross-correlation = " + fmt(c4_xcorr) +
                                   " >= 0.99"));
        emit(opt, results.back());
    }

    // ---- criterion 5: efficiency ceilings versus k3 ------------------------
    {
        const RunSpec spec8 = with([](RunSpec& s) { s.medium.optical_depth = 8.0; });
        const AbsorbedMedium m8 = absorb(spec8);
        bool ok = true;
        std::ostringstream detail;
        detail.precision(4);
        for (double k3 : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
            RunSpec sb = spec8;
            sb.noise.k3 = k3;
            validate_spec(sb);
            RunSpec sf = sb;
            sf.protocol.direction = Direction::Forward;
            validate_spec(sf);
            const double kk = dephasing_factor(k3) * dephasing_factor(k3);
            const double eb = finish_protocol(m8, sb).eff13.exit_face;
            const double ef = finish_protocol(m8, sf).eff13.max_over_z;
            const bool row_ok =
                std::abs(eb - kk) <= 0.02 && std::abs(ef - kk * kForwardIdealMax) <= 0.02;
            ok = ok && row_ok;
            detail << " k3=" << k3 << ": b " << eb << "/" << kk << ", f " << ef << "/"
                   << kk * kForwardIdealMax << ";";
        }
        results.push_back(make(5, "noise ceiling curves at depth 8 (backward K^2, forward "
                                  "K^2 * 0.541, +- 0.02)", ok, detail.str()));
        emit(opt, results.back());
    }

    // ---- criterion 6: weak-field validity ---------------------------------
    {
        const RunSpec spec_full = with([](RunSpec& s) {
            s.noise.k3 = 5.0;
            s.numerics.bloch = BlochMode::Full;
        });
        const RunResult rf = finish_protocol(absorb(spec_full), spec_full);
        const double maxima =
            std::max({rf.diagnostics.max_p11_avg, rf.diagnostics.max_p22_avg,
                      rf.diagnostics.max_s12_avg});
        const double dist = rel_l2(rf.retrieval.series13(rf.retrieval.exit_node()),
                                   r1.retrieval.series13(r1.retrieval.exit_node()));
        const bool ok = maxima <= 1e-6 && dist <= 1e-4;
        results.push_back(
            make(6, "weak-field validity of the full three-level run", ok,
                 "max excited population / two-photon coherence = " + fmt(maxima) +
                     " <= 1e-6 (per-class extreme " + fmt(rf.diagnostics.max_p11_class) +
                     "), weak vs full retrieved-field distance = " + fmt(dist) + " <= 1e-4"));
        emit(opt, results.back());
    }

    // ---- criterion 7: polarization independence ---------------------------
    {
        const RunSpec sa = with([](RunSpec& s) { s.pulse.relative_phase = 0.9; });
        const RunSpec sb = with([](RunSpec& s) {
            s.pulse.relative_phase = 0.9;
            s.pulse.split_left = 0.3;
            s.pulse.split_right = 0.7;
        });
        const RunResult ra = run_protocol(sa);
        const RunResult rb = run_protocol(sb);
        const double de = std::max(std::abs(ra.eff13.exit_face - rb.eff13.exit_face),
                                   std::abs(ra.eff23.exit_face - rb.eff23.exit_face));
        auto proportionality = [](const RunResult& r) {
            const cplx ratio = std::polar(
                std::sqrt(r.spec.pulse.split_right / r.spec.pulse.split_left),
                r.spec.pulse.relative_phase);
            double worst = 0.0;
            for (const StageRecord* rec : {&r.absorption, &r.retrieval})
                for (std::size_t i = 0; i < rec->omega13.data().size(); ++i)
                    worst = std::max(worst, std::abs(rec->omega23.data()[i] -
                                                     ratio * rec->omega13.data()[i]));
            return worst;
        };
        const double prop = std::max(proportionality(ra), proportionality(rb));
        const bool ok = de <= 1e-6 && prop <= 1e-8;
        results.push_back(make(7, "efficiency independent of the polarization split", ok,
                               "efficiency difference across splits = " + fmt(de) +
                                   " <= 1e-6, channel proportionality residual = " + fmt(prop) +
                                   " <= 1e-8"));
        emit(opt, results.back());
    }

    // ---- criterion 8: deterministic phases and fidelity --------------------
    {
        const RunSpec sp = with([](RunSpec& s) { s.phases = {std::numbers::pi / 2.0, 0.0, 0.0}; });
        const RunResult rp = finish_protocol(m45, sp);
        const double de = std::max(std::abs(rp.eff13.exit_face - r4.eff13.exit_face),
                                   std::abs(rp.eff23.exit_face - r4.eff23.exit_face));
        const bool a_ok = de <= 1e-6 && std::abs(rp.qubit.fidelity.conditional - 0.52) <= 1e-3;

        const RunSpec s3 = with([](RunSpec& s) { s.phases = {0.0, 0.0, 2.0}; });
        const RunResult r3 = finish_protocol(m45, s3);
        const double dobs = std::max(
            {std::abs(r3.eff13.exit_face - r4.eff13.exit_face),
             std::abs(r3.eff23.exit_face - r4.eff23.exit_face),
             std::abs(r3.eff13.max_over_z - r4.eff13.max_over_z),
             std::abs(r3.eff23.max_over_z - r4.eff23.max_over_z),
             std::abs(r3.qubit.fidelity.conditional - r4.qubit.fidelity.conditional),
             std::abs(r3.qubit.fidelity.unconditional - r4.qubit.fidelity.unconditional),
             std::abs(r3.qubit.relative_phase - r4.qubit.relative_phase)});
        const bool ok = a_ok && dobs <= 1e-8;
        results.push_back(make(8, "level-phase fidelity (phi1 = pi/2 -> F = 0.52) and "
                                  "ground-phase invariance", ok,
                               "conditional fidelity = " + fmt(rp.qubit.fidelity.conditional) +
                                   " (target 0.52 +- 1e-3), efficiency shift = " + fmt(de) +
                                   " <= 1e-6, phi3 observable shift = " + fmt(dobs) + " <= 1e-8"));
        emit(opt, results.back());
    }

    // ---- criterion 9: Monte Carlo versus analytic noise --------------------
    {
        const RunSpec smc = with([](RunSpec& s) {
            s.noise.k3 = 5.0;
            s.noise.mode = NoiseMode::MonteCarlo;
            s.noise.n_samples = 100000;
        });
        const RunResult rmc = finish_protocol(m45, smc);
        const double rel = std::max(
            std::abs(rmc.eff13.exit_face - r1.eff13.exit_face) / r1.eff13.exit_face,
            std::abs(rmc.eff23.exit_face - r1.eff23.exit_face) / r1.eff23.exit_face);
        const bool ok = rel <= 0.01;
        results.push_back(make(9, "Monte Carlo noise matches the analytic K factors", ok,
                               "relative efficiency difference = " + fmt(rel) +
                                   " <= 0.01 (n_samples = 1e5)"));
        emit(opt, results.back());
    }

    // ---- criterion 10: oracle integrity ------------------------------------
    {
        const cplx drive(1e-3, 0.0);
        cplx s13{}, s23{};
        const FieldSample f{drive, 0.0};
        const double dt = 0.01;
        const int steps = static_cast<int>(std::lround(std::numbers::pi / dt));
        for (int i = 0; i < steps; ++i) rk4_step_class(s13, s23, 1.0, f, f, f, dt);
        const double rk4_err = std::abs(s13 - closed_form_constant_drive(drive, 1.0, steps * dt));

        const InhomogeneousProfile prof{ProfileShape::Rectangular, 1.0};
        double quad_err = 0.0;
        for (double w : {0.0, 0.3, -0.3, 0.6, -0.6, 0.9, -0.9}) {
            quad_err = std::max(quad_err,
                                std::abs(response_H(w, prof) - response_H_quadrature(w, prof)));
            const auto [f_cl, j_cl] = response_F_and_J(w, prof);
            quad_err = std::max(quad_err, std::abs(f_cl - response_F_quadrature(w, prof)));
            quad_err = std::max(quad_err, std::abs(j_cl - response_J_quadrature(w, prof)));
        }

        const double k5 = dephasing_factor(5.0);
        const double k5_err =
            std::max(std::abs(k5 - k_factor_series_oracle(5.0)), std::abs(k5 - kKFactor5));

        const bool ok = rk4_err <= 1e-10 && quad_err <= 1e-6 && k5_err <= 1e-6;
        results.push_back(make(10, "integration, quadrature and Bessel oracles", ok,
                               "rk4 error = " + fmt(rk4_err) + " <= 1e-10, response quadrature "
                                   "error = " + fmt(quad_err) + " <= 1e-6, K(5) error = " +
                                   fmt(k5_err) + " <= 1e-6"));
        emit(opt, results.back());
    }

    // ---- criterion 11: grid convergence -------------------------------------
    if (opt.convergence) {
        RunSpec fine = base;
        fine.medium.n_z = 2 * base.medium.n_z;
        fine.broadening.n_classes = 2 * base.broadening.n_classes - 1;
        fine.numerics.dt = base.numerics.dt / 2.0;
        validate_spec(fine);
        auto refine = [&](const RunSpec& coarse) {
            RunSpec s = fine;
            s.protocol = coarse.protocol;
            s.noise = coarse.noise;
            s.phases = coarse.phases;
            validate_spec(s);
            return s;
        };
        const AbsorbedMedium m45f = absorb(fine);
        const RunResult f1 = finish_protocol(m45f, refine(spec_noisy_b));
        const RunResult f2 = finish_protocol(m45f, refine(spec_noisy_f));
        const RunResult f4 = finish_protocol(m45f, refine(spec_clean_b));

        RunSpec fine_fwd = refine(spec_fwd_clean);
        const std::vector<double> c3f_depths = {1.8, 1.9, 2.0, 2.1, 2.2};
        double c3f_max = 0.0;
        for (const SweepRow& row : run_sweep(fine_fwd, c3f_depths,
                                             {std::numeric_limits<double>::infinity()}))
            c3f_max = std::max(c3f_max, row.eff13_exit);

        const double d1 = std::abs(f1.eff13.exit_face - r1.eff13.exit_face);
        const double d2 = std::abs(f2.eff13.max_over_z - r2.eff13.max_over_z);
        const double d3 = std::abs(c3f_max - c3_max);
        const double d4 = std::abs(f4.eff13.exit_face - r4.eff13.exit_face);
        const double worst = std::max({d1, d2, d3, d4});
        const bool ok = worst < 0.005;
        results.push_back(make(11, "grid refinement shifts headline results by < 0.5%", ok,
                               "shifts: c1 " + fmt(d1) + ", c2 " + fmt(d2) + ", c3 " + fmt(d3) +
                                   ", c4 " + fmt(d4) + " (bound 0.005)"));
        emit(opt, results.back());
    }

    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CriterionResult& r) { return r.pass; });
}

std::string acceptance_report_json(const std::vector<CriterionResult>& results) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["criteria"] = nlohmann::ordered_json::array();
    for (const CriterionResult& r : results)
        j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass},
                                 {"detail", r.detail}});
    j["all_pass"] = all_passed(results);
    return j.dump(2) + "\n";
}

}  // namespace cribsim
