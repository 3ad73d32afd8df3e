#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bipolar/initial_conditions.hpp"
#include "bipolar/potentials.hpp"

namespace bipolar {

struct PotentialConfig {
    std::string model = "eckart";  // eckart | barrier_ramp | two_surface | free
    double v0 = 0.0024;
    double alpha = 2.5;
    double beta = 2.5;
    double v_left = 0.0;
    double v_right = 0.0;
    double d0 = 0.0;
    std::size_t surfaces = 1;  // free model only
};

struct GridConfig {
    double x_left = -35.0;
    double x_right = 35.0;
    std::size_t n_points = 876;
};

struct TimeConfig {
    double dt = 0.1;
    double t_max = 11600.0;
    /// Uniformly spaced analysis snapshots, both ends included. Ignored when
    /// snapshot_times is non-empty.
    std::size_t snapshot_count = 201;
    std::vector<double> snapshot_times;
    std::string stepper = "euler";  // euler | rk4
    std::size_t diagnostics_stride = 10;
    double norm_limit = 10.0;
};

struct ModeConfig {
    std::string kind = "single";  // single | splice | multisurface
    double x_divide = 0.0;
    double v0_eff = 0.0;
    std::size_t incident_surface = 1;  // 1-based
};

struct ThresholdConfig {
    double separation = 1e-3;
    double localization = 1e-2;
    double node_depth = 1e-4;
    double node_shoulder = 1e-2;
    double tail_fraction = 0.1;
    double admissibility = 1e-6;
    double splice_tolerance = 1e-6;
};

struct StageConfig {
    double speed_fraction = 0.5;
    double min_probability = 0.01;
    double final_window = 0.1;
};

struct OracleConfig {
    bool enabled = false;
    double dt_divisor = 10.0;
    std::string dispersion = "exact";  // exact | finite_difference
};

struct OutputConfig {
    std::string directory = "bipolar_out";
    bool snapshots = true;
    /// Every n-th analysis snapshot is written (the last one always is).
    std::size_t snapshot_stride = 20;
};

/// Checks made by `run --assert`. A negative tolerance disables its check.
struct AssertionConfig {
    double max_norm_drift = 0.01;
    /// Conditions (1, 2, 3) that must pass on the analysed snapshots.
    std::vector<int> conditions = {1, 2, 3};
    /// Inclusive [lo, hi] bounds on the combined-probability minimum; empty disables.
    std::vector<double> combined_min_range;
    double combined_final_tolerance = 0.01;
    double branch_sum_tolerance = 0.01;
    double oracle_tolerance = 5e-3;
};

struct RunConfig {
    std::string name = "custom";
    PotentialConfig potential;
    PacketSpec packet;
    GridConfig grid;
    TimeConfig time;
    ModeConfig mode;
    ThresholdConfig thresholds;
    StageConfig stage;
    OracleConfig oracle;
    OutputConfig output;
    AssertionConfig assertions;
};

std::string to_json_text(const RunConfig& config, int indent = 2);

/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json_text(std::string_view text);
RunConfig load_config(const std::string& path);

/// `key=value` with a dotted key such as `packet.p0=4`. The value is parsed as
/// JSON when possible and taken as a string otherwise.
void apply_override(RunConfig& config, std::string_view assignment);

std::vector<std::string> preset_names();
/// Throws std::invalid_argument for an unknown name.
RunConfig preset(std::string_view name);

PotentialModel make_potential(const RunConfig& config);
Grid make_config_grid(const RunConfig& config);
/// Analysis snapshot times in [0, t_max].
std::vector<double> snapshot_schedule(const RunConfig& config);

struct Finding {
    std::string severity;  // error | warning
    std::string code;
    std::string message;
    double value = 0.0;
};

/// Never throws for bad parameters; every problem becomes a finding.
std::vector<Finding> validate(const RunConfig& config);

}  // namespace bipolar
