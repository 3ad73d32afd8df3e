#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bipolar/potentials.hpp"
#include "bipolar/state.hpp"

namespace bipolar {

struct SurfaceDensities {
    std::vector<double> plus;   // |psi_+|^2
    std::vector<double> minus;  // |psi_-|^2
    std::vector<double> total;  // |psi_+ + psi_-|^2
};

std::vector<SurfaceDensities> densities(const BipolarState& state);

struct SurfaceFlux {
    std::vector<double> plus;
    std::vector<double> minus;
};

/// j = (1/m) Im(conj(psi) * dpsi/dx) with the centered difference.
std::vector<double> flux(const ComplexField& psi, double mass);
std::vector<SurfaceFlux> component_flux(const BipolarState& state);

/// Integral of rho_+ + rho_- summed over surfaces. Not conserved in time.
double combined_probability(const BipolarState& state);

/// Integral of |psi_+ + psi_-|^2 summed over surfaces.
double total_probability(const BipolarState& state);

/// |d rho_+-/dt - (-j_+-' +- V' Im[conj(psi_+-) (Psi_+ - Psi_-)])| per node for a
/// single-surface state, with d rho/dt = 2 Re(conj(psi) rhs).
struct DensityRateResidual {
    std::vector<double> plus;
    std::vector<double> minus;
    double max() const;
};

DensityRateResidual density_rate_residual(const BipolarState& state, const RhsFields& rhs,
                                          const PotentialModel& potential);

/// psi = R exp(i S). S is unwrapped along the grid over nodes with
/// R > floor * max R and is NaN elsewhere.
struct AmplitudePhase {
    std::vector<double> amplitude;
    std::vector<double> phase;
    double floor = 1e-8;
};

AmplitudePhase amplitude_phase(const ComplexField& psi, double relative_floor = 1e-8);

/// R exp(i S) where S is defined, zero elsewhere.
ComplexField reconstruct(const AmplitudePhase& ap, const Grid& grid);

struct ConditionThresholds {
    double separation = 1e-3;     // condition 1
    double localization = 1e-2;   // condition 2
    double node_depth = 1e-4;     // condition 3, dip below depth * rho_max
    double node_shoulder = 1e-2;  // condition 3, envelope above shoulder * rho_max on both sides
    double tail_fraction = 0.1;   // condition 2, share of the grid counted as the right tail
    double x_divide = 0.0;
};

struct NodeEvent {
    double t = 0.0;
    double x = 0.0;
    std::size_t surface = 0;
    Sign sign = Sign::plus;
    double depth = 0.0;  // rho / rho_max at the dip
};

struct ConditionReport {
    struct Separation {
        double t0_purity = 0.0;      // largest ||psi_-||^2 at t0 over surfaces
        double tf_separation = 0.0;  // largest misplaced probability at tf
        std::vector<double> tf_minus_right;  // per surface, integral of rho_- over x > x_D
        std::vector<double> tf_plus_left;    // per surface, integral of rho_+ over x < x_D
    } condition1;
    struct Localization {
        std::vector<double> max_tail_ratio;  // per snapshot
        double worst = 0.0;
    } condition2;
    struct Nodes {
        std::vector<NodeEvent> events;
    } condition3;

    ConditionThresholds thresholds;
    bool condition1_pass = false;
    bool condition2_pass = false;
    bool condition3_pass = false;
};

/// Node dips of one component density. Consecutive sub-threshold nodes form
/// one event located at their minimum.
std::vector<std::size_t> find_nodes(std::span<const double> rho, double depth, double shoulder);

/// Snapshots must be time-ordered; the first is taken as t0, the last as tf.
/// Throws std::invalid_argument with fewer than two snapshots.
ConditionReport check_conditions(std::span<const BipolarState> snapshots, const ConditionThresholds& thresholds = {});

/// Node detector alone, over every component of every snapshot.
std::vector<NodeEvent> node_events(std::span<const BipolarState> snapshots, const ConditionThresholds& thresholds = {});

struct BranchProbabilities {
    double reflection = 0.0;    // integral of rho_-
    double transmission = 0.0;  // integral of rho_+
    bool separated = false;     // condition 1 held at this state
};

std::vector<BranchProbabilities> reflection_transmission(const BipolarState& final_state, double x_divide = 0.0,
                                                         double separation_threshold = 1e-3);

struct StageOptions {
    double speed_fraction = 0.5;
    double min_probability = 0.01;
    double final_window = 0.1;
};

/// Density centroid of one component, or NaN for a vanishing component.
double centroid(const ComplexField& psi);

/// Earliest snapshot time at which the centroid speed of the chosen component
/// (backward difference between consecutive snapshots) exceeds
/// speed_fraction of its average over the final window, with the component
/// holding more than min_probability at both ends of the interval.
std::optional<double> stage_transition_time(std::span<const BipolarState> snapshots, std::size_t surface = 0,
                                            Sign component = Sign::minus, const StageOptions& options = {});

/// First snapshot time at which the density peak of psi_+ has reached or
/// passed that of psi_-, counting only snapshots where both components hold
/// more than min_probability.
std::optional<double> peak_coincidence_time(std::span<const BipolarState> snapshots, std::size_t surface = 0,
                                            double min_probability = 0.01);

struct SummaryReport {
    std::vector<BranchProbabilities> branches;
    double combined_min = 0.0;
    double combined_min_time = 0.0;
    double combined_final = 0.0;
    double total_initial = 0.0;
    double total_final = 0.0;
    double norm_drift = 0.0;  // total_final / total_initial - 1
    std::optional<double> stage_transition_time;
    std::optional<double> peak_coincidence_time;
    ConditionReport conditions;
};

}  // namespace bipolar
