#pragma once

#include <string>
#include <vector>

#include "cribsim/bloch.hpp"
#include "cribsim/ensemble.hpp"
#include "cribsim/phase_noise.hpp"
#include "cribsim/profile.hpp"
#include "cribsim/pulse.hpp"
#include "cribsim/types.hpp"

namespace cribsim {

struct MediumParams {
    double optical_depth = 4.5;
    int n_z = 100;  // z nodes spanning [0, optical_depth]
};

struct BroadeningParams {
    double half_width = 10.0;
    int n_classes = 201;
};

enum class PhaseMatchingOption { Auto, On, Off };

struct ProtocolParams {
    Direction direction = Direction::Backward;
    double storage_time = 5.0;
    PhaseMatchingOption phase_matching = PhaseMatchingOption::Auto;
};

struct NumericsParams {
    double dt = 0.02;
    double window_start = -15.0;
    double window_end = 15.0;
    BlochMode bloch = BlochMode::Weak;
    double weak_threshold = 1e-3;        // peak Rabi frequency guard
    double population_threshold = 1e-6;  // weak-field diagnostic verdict
};

struct OutputParams {
    std::string prefix = "run";
    bool write_grids = true;
};

/// Complete declarative description of one protocol run.
struct RunSpec {
    PulseSpec pulse;
    MediumParams medium;
    BroadeningParams broadening;
    ProtocolParams protocol;
    LevelPhases phases;
    NoiseParams noise;
    NumericsParams numerics;
    OutputParams output;

    std::vector<std::string> warnings;  // collected during validation

    InhomogeneousProfile profile() const {
        return {ProfileShape::Rectangular, broadening.half_width};
    }
    double du() const { return medium.optical_depth / (medium.n_z - 1); }
    /// Retrieval runs from the reversal until the echo (delayed by the
    /// storage time) has fully left the window.
    double retrieval_span() const { return numerics.window_end + protocol.storage_time; }
    double total_window() const {
        return -numerics.window_start + protocol.storage_time + retrieval_span();
    }
    bool backward() const { return protocol.direction == Direction::Backward; }
};

bool operator==(const PulseSpec&, const PulseSpec&);
bool operator==(const MediumParams&, const MediumParams&);
bool operator==(const BroadeningParams&, const BroadeningParams&);
bool operator==(const ProtocolParams&, const ProtocolParams&);
bool operator==(const LevelPhases&, const LevelPhases&);
bool operator==(const NoiseParams&, const NoiseParams&);
bool operator==(const NumericsParams&, const NumericsParams&);
bool operator==(const OutputParams&, const OutputParams&);
bool operator==(const RunSpec&, const RunSpec&);

/// Validates every cross-field constraint; throws ConfigError naming the
/// violated invariant, appends non-fatal findings to spec.warnings.
void validate_spec(RunSpec& spec);

/// Parses the flat sectioned key-value format. Unspecified keys take the
/// documented defaults; unknown sections or keys are errors.
RunSpec parse_config_text(const std::string& text);
RunSpec parse_config(const std::string& path);

/// Canonical serialization; parse_config_text(serialize_config(s)) == s.
std::string serialize_config(const RunSpec& spec);

}  // namespace cribsim
