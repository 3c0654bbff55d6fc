#pragma once

#include <filesystem>
#include <vector>

#include "cribsim/config.hpp"

namespace cribsim {

struct SweepRow {
    double optical_depth;
    double k3;
    double eff13_exit, eff23_exit;
    double eff13_max, eff23_max;
    double analytic_exit, analytic_max;
};

/// One protocol run per (optical depth, k3) grid point, simulated and
/// analytic efficiencies side by side. Points are independent runs and are
/// evaluated in parallel; the result does not depend on the thread count.
std::vector<SweepRow> run_sweep(const RunSpec& base, const std::vector<double>& depths,
                                const std::vector<double>& k3_values);

void write_sweep_csv(const std::vector<SweepRow>& rows, Direction direction,
                     const std::filesystem::path& path);

}  // namespace cribsim
