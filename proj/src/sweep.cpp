#include "cribsim/sweep.hpp"

#include <cstdio>
#include <exception>
#include <fstream>

#include "cribsim/runner.hpp"

namespace cribsim {

std::vector<SweepRow> run_sweep(const RunSpec& base, const std::vector<double>& depths,
                                const std::vector<double>& k3_values) {
    if (depths.empty() || k3_values.empty())
        throw ConfigError("sweep axes must be non-empty");
    const std::size_t total = depths.size() * k3_values.size();
    std::vector<SweepRow> rows(total);
    std::exception_ptr failure;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::size_t idx = 0; idx < total; ++idx) {
        try {
            RunSpec spec = base;
            spec.medium.optical_depth = depths[idx / k3_values.size()];
            spec.noise.k3 = k3_values[idx % k3_values.size()];
            spec.output.write_grids = false;
            validate_spec(spec);
            const RunResult r = run_protocol(spec);
            SweepRow& row = rows[idx];
            row.optical_depth = spec.medium.optical_depth;
            row.k3 = spec.noise.k3;
            row.eff13_exit = r.eff13.exit_face;
            row.eff23_exit = r.eff23.exit_face;
            row.eff13_max = r.eff13.max_over_z;
            row.eff23_max = r.eff23.max_over_z;
            row.analytic_exit = r.analytic.predicted_exit13;
            row.analytic_max = r.analytic.predicted_max13;
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(cribsim_sweep_err)
#endif
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, Direction direction,
                     const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    out << "optical_depth,k3,direction,eff13_exit,eff23_exit,eff13_max,eff23_max,"
           "analytic_exit,analytic_max\n";
    char buf[256];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      r.optical_depth, r.k3, to_string(direction), r.eff13_exit, r.eff23_exit,
                      r.eff13_max, r.eff23_max, r.analytic_exit, r.analytic_max);
        out << buf;
    }
}

}  // namespace cribsim
