#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cribsim/runner.hpp"

namespace cribsim {

/// JSON run summary with a stable schema and deterministic key order; the
/// same spec and seed produce byte-identical output.
std::string summary_json(const RunResult& result);

/// Stage grid as CSV rows (t, z, I13, I23), z-major, n_z * n_t rows.
void write_stage_csv(const StageRecord& record, double input_peak_intensity,
                     const std::filesystem::path& path);

/// Writes the summary and, when enabled, one grid CSV per stage. Returns the
/// created paths; on failure partial outputs are removed before rethrowing.
std::vector<std::filesystem::path> write_run_outputs(const RunResult& result,
                                                     const std::filesystem::path& out_dir);

}  // namespace cribsim
