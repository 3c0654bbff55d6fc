#pragma once

#include <filesystem>
#include <vector>

#include "cribsim/types.hpp"

namespace cribsim {

/// Emits the closed-form reference curves as CSV tables, no simulation:
/// the dephasing factor K(k), the retrieval coefficients over optical depth,
/// the large-depth efficiency ceilings over k3, and the qubit phase-fidelity
/// surface. Returns the created paths.
std::vector<std::filesystem::path> write_analytic_tables(const std::filesystem::path& out_dir);

}  // namespace cribsim
