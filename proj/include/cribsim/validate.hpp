#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cribsim/config.hpp"

namespace cribsim {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;  // measured values and bounds, one line
};

struct AcceptanceOptions {
    bool convergence = true;      // include the grid-refinement criterion
    std::ostream* progress = nullptr;
};

/// Runs the full acceptance suite against the spec's grid resolution (the
/// physics parameters of each criterion are fixed). Prints one pass/fail
/// line per criterion to the progress stream when given.
std::vector<CriterionResult> run_acceptance(const RunSpec& base, const AcceptanceOptions& options);

bool all_passed(const std::vector<CriterionResult>& results);

/// Machine-readable report of the results (deterministic for a fixed seed).
std::string acceptance_report_json(const std::vector<CriterionResult>& results);

}  // namespace cribsim
