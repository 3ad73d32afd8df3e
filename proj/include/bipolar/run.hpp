#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bipolar/config.hpp"
#include "bipolar/diagnostics.hpp"
#include "bipolar/propagator.hpp"

namespace bipolar {

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what, std::vector<Finding> findings = {})
        : std::runtime_error(what), findings_(std::move(findings)) {}
    const std::vector<Finding>& findings() const { return findings_; }

private:
    std::vector<Finding> findings_;
};

/// Everything a run computes, before anything is written.
struct Experiment {
    RunConfig config;
    std::vector<Finding> findings;
    /// Analysis snapshots: the spliced states in splice mode.
    std::vector<BipolarState> snapshots;
    /// The propagation (the V0 = V_L run in splice mode).
    PropagationResult primary;
    /// The V0 = V_R run, splice mode only.
    std::optional<PropagationResult> secondary;
    double splice_mismatch = 0.0;
    /// Initial decomposition.
    double initial_minus_norm = 0.0;
    double discarded_probability = 0.0;
    /// Node detector on the constituent runs, splice mode only.
    std::vector<NodeEvent> constituent_node_events;

    SummaryReport summary;

    bool oracle_ran = false;
    std::vector<double> oracle_deviation;  // per analysis snapshot
    double oracle_max_deviation = 0.0;
    std::string oracle_error;

    double propagation_seconds = 0.0;
    double oracle_seconds = 0.0;
};

/// Validates, builds the initial state, propagates and analyses. Throws
/// ValidationError on error findings and InstabilityError when the norm
/// guard trips.
Experiment execute(const RunConfig& config);

struct AssertionResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<AssertionResult> evaluate_assertions(const Experiment& experiment);

/// Snapshot CSV for one state; 17 significant digits.
std::string snapshot_csv(const BipolarState& state);

/// summary.json content. Deterministic for a given config (timings are
/// written separately).
std::string summary_json(const Experiment& experiment, const std::vector<AssertionResult>& assertions);

struct RunOptions {
    bool assert_acceptance = false;
    std::optional<bool> oracle;
    std::optional<std::string> output_directory;
};

enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_instability = 3, exit_assertion = 4 };

struct RunOutcome {
    int exit_code = exit_ok;
    std::string message;
    std::vector<std::string> files;
    std::vector<AssertionResult> assertions;
};

/// execute() plus output files and optional assertions, mapped to exit codes.
RunOutcome run(RunConfig config, const RunOptions& options = {});

}  // namespace bipolar
