#include "cribsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cribsim/bloch.hpp"

namespace cribsim {

const char* to_string(StageTag tag) {
    switch (tag) {
        case StageTag::Absorption: return "absorption";
        case StageTag::RetrievalForward: return "retrieval_forward";
        case StageTag::RetrievalBackward: return "retrieval_backward";
    }
    return "?";
}

void StageMaxima::merge(const StageMaxima& o) {
    p11_avg = std::max(p11_avg, o.p11_avg);
    p22_avg = std::max(p22_avg, o.p22_avg);
    s12_avg = std::max(s12_avg, o.s12_avg);
    p11_class = std::max(p11_class, o.p11_class);
    p22_class = std::max(p22_class, o.p22_class);
    s12_class = std::max(s12_class, o.s12_class);
}

std::pair<cplx, cplx> field_source(std::span<const cplx> s13, std::span<const cplx> s23,
                                   std::span<const double> weights, double prefactor,
                                   Direction direction) {
    cplx a{}, b{};
    const std::size_t n = weights.size();
    for (std::size_t i = 0; i < n; ++i) {
        a += weights[i] * s13[i];
        b += weights[i] * s23[i];
    }
    const cplx iu = direction == Direction::Forward ? cplx(0.0, -prefactor) : cplx(0.0, prefactor);
    return {iu * a, iu * b};
}

namespace {

struct StageSetup {
    StageTag tag;
    Direction active;        // coherence components driven in this stage
    bool descending;         // sweep from the far face toward z = 0
    double du;
    double dt;
    double prefactor;        // 1/J(0)
    std::vector<double> times;
    std::vector<double> depths;
    std::vector<cplx> boundary13, boundary23;  // field at the launch node
};

// Scratch rows reused across nodes: weighted per-class trajectories.
struct SliceScratch {
    Grid2D<cplx> w13, w23;
    Grid2D<double> wp11, wp22;  // full mode diagnostics
    Grid2D<cplx> ws12;
};

// Integrates every class at one node over the whole window with the given
// field series, filling the weighted rows. commit stores the final state
// back into the ensemble and accumulates full-mode maxima.
void integrate_node(EnsembleState& ens, int z, Direction dir, const cplx* f13, const cplx* f23,
                    int n_t, double dt, SliceScratch& scr, bool commit, StageMaxima* maxima) {
    auto& s13 = ens.sigma13(dir);
    auto& s23 = ens.sigma23(dir);
    const std::size_t base = ens.cell(z, 0);
    const bool full = ens.mode == BlochMode::Full;

    if (!full) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int n = 0; n < ens.n_classes; ++n) {
            const double delta = ens.detunings[n];
            const double w = ens.weights[n];
            cplx a = s13[base + n];
            cplx b = s23[base + n];
            cplx* r13 = scr.w13.row(n);
            cplx* r23 = scr.w23.row(n);
            r13[0] = w * a;
            r23[0] = w * b;
            for (int j = 0; j + 1 < n_t; ++j) {
                const FieldSample f0{f13[j], f23[j]};
                const FieldSample f1{f13[j + 1], f23[j + 1]};
                const FieldSample fh{0.5 * (f0.omega13 + f1.omega13),
                                     0.5 * (f0.omega23 + f1.omega23)};
                rk4_step_class(a, b, delta, f0, fh, f1, dt);
                r13[j + 1] = w * a;
                r23[j + 1] = w * b;
            }
            if (commit) {
                s13[base + n] = a;
                s23[base + n] = b;
            }
        }
    } else {
        StageMaxima local;
#ifdef _OPENMP
#pragma omp parallel
#endif
        {
            StageMaxima mine;
#ifdef _OPENMP
#pragma omp for schedule(static) nowait
#endif
            for (int n = 0; n < ens.n_classes; ++n) {
                const double delta = ens.detunings[n];
                const double w = ens.weights[n];
                FullState st;
                st.p11 = ens.p11[base + n];
                st.p22 = ens.p22[base + n];
                st.p33 = ens.p33[base + n];
                st.s12 = ens.s12[base + n];
                st.s13 = s13[base + n];
                st.s23 = s23[base + n];
                cplx* r13 = scr.w13.row(n);
                cplx* r23 = scr.w23.row(n);
                double* rp11 = scr.wp11.row(n);
                double* rp22 = scr.wp22.row(n);
                cplx* rs12 = scr.ws12.row(n);
                r13[0] = w * st.s13;
                r23[0] = w * st.s23;
                rp11[0] = w * st.p11;
                rp22[0] = w * st.p22;
                rs12[0] = w * st.s12;
                for (int j = 0; j + 1 < n_t; ++j) {
                    const FieldSample f0{f13[j], f23[j]};
                    const FieldSample f1{f13[j + 1], f23[j + 1]};
                    const FieldSample fh{0.5 * (f0.omega13 + f1.omega13),
                                         0.5 * (f0.omega23 + f1.omega23)};
                    rk4_step_class(st, delta, f0, fh, f1, dt);
                    r13[j + 1] = w * st.s13;
                    r23[j + 1] = w * st.s23;
                    rp11[j + 1] = w * st.p11;
                    rp22[j + 1] = w * st.p22;
                    rs12[j + 1] = w * st.s12;
                    if (commit) {
                        mine.p11_class = std::max(mine.p11_class, std::abs(st.p11));
                        mine.p22_class = std::max(mine.p22_class, std::abs(st.p22));
                        mine.s12_class = std::max(mine.s12_class, std::abs(st.s12));
                    }
                }
                if (commit) {
                    ens.p11[base + n] = st.p11;
                    ens.p22[base + n] = st.p22;
                    ens.p33[base + n] = st.p33;
                    ens.s12[base + n] = st.s12;
                    s13[base + n] = st.s13;
                    s23[base + n] = st.s23;
                }
            }
#ifdef _OPENMP
#pragma omp critical(cribsim_maxima)
#endif
            local.merge(mine);
        }
        if (commit && maxima != nullptr) {
            // class-averaged populations per time sample
            for (int j = 0; j < n_t; ++j) {
                double a11 = 0.0, a22 = 0.0;
                cplx a12{};
                for (int n = 0; n < ens.n_classes; ++n) {
                    a11 += scr.wp11(n, j);
                    a22 += scr.wp22(n, j);
                    a12 += scr.ws12(n, j);
                }
                local.p11_avg = std::max(local.p11_avg, std::abs(a11));
                local.p22_avg = std::max(local.p22_avg, std::abs(a22));
                local.s12_avg = std::max(local.s12_avg, std::abs(a12));
            }
            maxima->merge(local);
        }
    }
}

// Reduces the weighted rows into the propagation source series (fixed class
// order, so the result is independent of the thread count).
void reduce_sources(const SliceScratch& scr, int n_classes, int n_t, double prefactor,
                    Direction dir, cplx* src13, cplx* src23) {
    std::fill(src13, src13 + n_t, cplx{});
    std::fill(src23, src23 + n_t, cplx{});
    for (int n = 0; n < n_classes; ++n) {
        const cplx* r13 = scr.w13.row(n);
        const cplx* r23 = scr.w23.row(n);
        for (int j = 0; j < n_t; ++j) {
            src13[j] += r13[j];
            src23[j] += r23[j];
        }
    }
    const cplx iu = dir == Direction::Forward ? cplx(0.0, -prefactor) : cplx(0.0, prefactor);
    for (int j = 0; j < n_t; ++j) {
        src13[j] *= iu;
        src23[j] *= iu;
    }
}

void check_finite(const EnsembleState& ens, Direction dir, int z, StageTag tag,
                  const std::vector<double>& times) {
    const auto& s13 = ens.sigma13(dir);
    const auto& s23 = ens.sigma23(dir);
    const std::size_t base = ens.cell(z, 0);
    for (int n = 0; n < ens.n_classes; ++n) {
        const cplx a = s13[base + n], b = s23[base + n];
        if (std::isfinite(a.real()) && std::isfinite(a.imag()) && std::isfinite(b.real()) &&
            std::isfinite(b.imag()))
            continue;
        std::ostringstream msg;
        msg << "non-finite coherence in stage " << to_string(tag) << " at z index " << z
            << ", class " << n << ", t <= " << times.back();
        throw NumericalError(msg.str());
    }
}

StageRecord run_stage(EnsembleState& ens, const StageSetup& setup, StageMaxima* maxima) {
    const int n_t = static_cast<int>(setup.times.size());
    const int n_z = ens.n_z;

    StageRecord rec;
    rec.tag = setup.tag;
    rec.times = setup.times;
    rec.depths = setup.depths;
    rec.omega13 = Grid2D<cplx>(n_z, n_t);
    rec.omega23 = Grid2D<cplx>(n_z, n_t);

    SliceScratch scr;
    scr.w13 = Grid2D<cplx>(ens.n_classes, n_t);
    scr.w23 = Grid2D<cplx>(ens.n_classes, n_t);
    if (ens.mode == BlochMode::Full) {
        scr.wp11 = Grid2D<double>(ens.n_classes, n_t);
        scr.wp22 = Grid2D<double>(ens.n_classes, n_t);
        scr.ws12 = Grid2D<cplx>(ens.n_classes, n_t);
    }

    std::vector<cplx> src_cur13(n_t), src_cur23(n_t), src_next13(n_t), src_next23(n_t);
    std::vector<cplx> pred13(n_t), pred23(n_t);

    const int launch = setup.descending ? n_z - 1 : 0;
    const int step = setup.descending ? -1 : 1;
    const double h = setup.descending ? -setup.du : setup.du;

    std::copy(setup.boundary13.begin(), setup.boundary13.end(), rec.omega13.row(launch));
    std::copy(setup.boundary23.begin(), setup.boundary23.end(), rec.omega23.row(launch));

    integrate_node(ens, launch, setup.active, rec.omega13.row(launch), rec.omega23.row(launch),
                   n_t, setup.dt, scr, true, maxima);
    check_finite(ens, setup.active, launch, setup.tag, setup.times);
    reduce_sources(scr, ens.n_classes, n_t, setup.prefactor, setup.active, src_cur13.data(),
                   src_cur23.data());

    for (int i = launch; i != launch + step * (n_z - 1); i += step) {
        const int next = i + step;
        const cplx* cur13 = rec.omega13.row(i);
        const cplx* cur23 = rec.omega23.row(i);

        // predictor: evaluate the medium response with the extrapolated field
        for (int j = 0; j < n_t; ++j) {
            pred13[j] = cur13[j] + h * src_cur13[j];
            pred23[j] = cur23[j] + h * src_cur23[j];
        }
        integrate_node(ens, next, setup.active, pred13.data(), pred23.data(), n_t, setup.dt, scr,
                       false, nullptr);
        reduce_sources(scr, ens.n_classes, n_t, setup.prefactor, setup.active, src_next13.data(),
                       src_next23.data());

        // corrector, then re-solve the local dynamics with the accepted field
        cplx* nx13 = rec.omega13.row(next);
        cplx* nx23 = rec.omega23.row(next);
        for (int j = 0; j < n_t; ++j) {
            nx13[j] = cur13[j] + 0.5 * h * (src_cur13[j] + src_next13[j]);
            nx23[j] = cur23[j] + 0.5 * h * (src_cur23[j] + src_next23[j]);
        }
        integrate_node(ens, next, setup.active, nx13, nx23, n_t, setup.dt, scr, true, maxima);
        check_finite(ens, setup.active, next, setup.tag, setup.times);
        reduce_sources(scr, ens.n_classes, n_t, setup.prefactor, setup.active, src_cur13.data(),
                       src_cur23.data());
    }

    for (const cplx& v : rec.omega13.data()) rec.max_abs13 = std::max(rec.max_abs13, std::abs(v));
    for (const cplx& v : rec.omega23.data()) rec.max_abs23 = std::max(rec.max_abs23, std::abs(v));
    return rec;
}

std::vector<double> time_grid(double t0, double t1, double dt) {
    const double span = t1 - t0;
    const int n_steps = static_cast<int>(std::lround(span / dt));
    std::vector<double> times(n_steps + 1);
    for (int j = 0; j <= n_steps; ++j) times[j] = t0 + j * dt;
    return times;
}

std::vector<double> depth_grid(const RunSpec& spec) {
    std::vector<double> depths(spec.medium.n_z);
    const double du = spec.du();
    for (int i = 0; i < spec.medium.n_z; ++i) depths[i] = i * du;
    return depths;
}

}  // namespace

StageRecord run_absorption(const RunSpec& spec, EnsembleState& ens, StageMaxima* maxima) {
    for (const cplx& v : ens.s13_f)
        if (v != cplx{}) throw ConfigError("absorption requires a ground-state ensemble");
    for (const cplx& v : ens.s23_f)
        if (v != cplx{}) throw ConfigError("absorption requires a ground-state ensemble");

    StageSetup setup;
    setup.tag = StageTag::Absorption;
    setup.active = Direction::Forward;
    setup.descending = false;
    setup.du = spec.du();
    setup.dt = spec.numerics.dt;
    setup.prefactor = 1.0 / spec.profile().j0();
    setup.times = time_grid(spec.numerics.window_start, 0.0, spec.numerics.dt);
    setup.depths = depth_grid(spec);
    setup.boundary13.resize(setup.times.size());
    setup.boundary23.resize(setup.times.size());
    for (std::size_t j = 0; j < setup.times.size(); ++j) {
        const FieldSample f = spec.pulse.sample(setup.times[j]);
        setup.boundary13[j] = f.omega13;
        setup.boundary23[j] = f.omega23;
    }
    return run_stage(ens, setup, maxima);
}

StageRecord run_retrieval(const RunSpec& spec, EnsembleState& ens, Direction direction,
                          StageMaxima* maxima) {
    if (!ens.reversed)
        throw ConfigError("retrieval requires reversed detunings");
    if (ens.phase_matched != (direction == Direction::Backward))
        throw ConfigError(direction == Direction::Backward
                              ? "backward retrieval requires the phase matching operation"
                              : "phase matching must not be applied for forward retrieval");

    StageSetup setup;
    setup.tag = direction == Direction::Backward ? StageTag::RetrievalBackward
                                                 : StageTag::RetrievalForward;
    setup.active = direction;
    setup.descending = direction == Direction::Backward;
    setup.du = spec.du();
    setup.dt = spec.numerics.dt;
    setup.prefactor = 1.0 / spec.profile().j0();
    setup.times = time_grid(0.0, spec.retrieval_span(), spec.numerics.dt);
    setup.depths = depth_grid(spec);
    setup.boundary13.assign(setup.times.size(), cplx{});
    setup.boundary23.assign(setup.times.size(), cplx{});
    return run_stage(ens, setup, maxima);
}

void reverse_detunings(EnsembleState& ens) {
    for (double& d : ens.detunings) d = -d;
    ens.reversed = !ens.reversed;
}

void apply_phase_matching(EnsembleState& ens) {
    ens.s13_b = ens.s13_f;
    ens.s23_b = ens.s23_f;
    std::fill(ens.s13_f.begin(), ens.s13_f.end(), cplx{});
    std::fill(ens.s23_f.begin(), ens.s23_f.end(), cplx{});
    ens.phase_matched = true;
}

void free_evolution(EnsembleState& ens, double duration) {
    if (duration == 0.0) return;
    std::vector<cplx> rot(ens.n_classes);
    for (int n = 0; n < ens.n_classes; ++n)
        rot[n] = std::polar(1.0, ens.detunings[n] * duration);
    auto rotate = [&](std::vector<cplx>& arr) {
        for (int z = 0; z < ens.n_z; ++z) {
            const std::size_t base = ens.cell(z, 0);
            for (int n = 0; n < ens.n_classes; ++n) arr[base + n] *= rot[n];
        }
    };
    rotate(ens.s13_f);
    rotate(ens.s13_b);
    rotate(ens.s23_f);
    rotate(ens.s23_b);
}

}  // namespace cribsim
