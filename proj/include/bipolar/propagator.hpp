#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bipolar/potentials.hpp"
#include "bipolar/state.hpp"

namespace bipolar {

/// Right-hand side of the bipolar evolution equations (hbar = 1):
///
///   d psi_{i,+-}/dt = -i [ sum_j H_ij psi_{j,+-}
///                          +- 1/2 sum_j V'_ij (Psi_{j,+} - Psi_{j,-}) ]
///
/// with H_ij = -delta_ij/(2m) d^2/dx^2 + V_ij and Psi the running integral
/// of psi from the left grid edge. The coupling terms enter the + and -
/// equations with opposite signs, so psi_+ + psi_- obeys the ordinary
/// (matrix) Schroedinger equation.
///
/// Potential samples are cached at construction; evaluate() does not
/// allocate after the first call.
class BipolarEngine {
public:
    BipolarEngine(const PotentialModel& potential, const Grid& grid, double mass);

    const Grid& grid() const { return grid_; }
    double mass() const { return mass_; }
    std::size_t n_surfaces() const { return sampled_.n_surfaces; }
    const SampledPotential& sampled() const { return sampled_; }

    void evaluate(const BipolarState& state, RhsFields& out);
    RhsFields evaluate(const BipolarState& state);

    /// Discrete unipolar right-hand side -i sum_j H_ij psi_j for per-surface
    /// totals. Used to check that the bipolar coupling cancels.
    std::vector<ComplexField> unipolar_rhs(const std::vector<ComplexField>& psi) const;

private:
    Grid grid_;
    double mass_;
    SampledPotential sampled_;
    std::vector<std::vector<Complex>> difference_;  // Psi_+ - Psi_- per surface
    std::vector<Complex> scratch_;
    std::vector<Complex> laplacian_;
};

/// Single-surface right-hand side. Throws if the potential has f != 1.
RhsFields bipolar_rhs(const BipolarState& state, const PotentialModel& potential);

/// Multisurface right-hand side. Throws on a surface-count mismatch.
RhsFields multisurface_rhs(const BipolarState& state, const PotentialModel& potential);

/// psi <- psi + dt * rhs for every component, edges re-clamped to zero,
/// t <- t + dt.
BipolarState euler_step(const BipolarState& state, const RhsFields& rhs, double dt);

enum class Stepper { forward_euler, runge_kutta4 };

struct PropagationOptions {
    double dt = 0.1;
    double t_max = 0.0;
    /// Requested snapshot times in [0, t_max]; each is captured at the
    /// nearest step. Empty means {0, t_max}.
    std::vector<double> snapshot_times;
    /// Norm diagnostics are recorded every `diagnostics_stride` steps (and
    /// at the final step).
    std::size_t diagnostics_stride = 10;
    Stepper stepper = Stepper::forward_euler;
    /// Abort once any component's squared norm exceeds this.
    double norm_limit = 10.0;
};

/// Squared norms recorded during propagation.
struct StepDiagnostics {
    std::size_t step = 0;
    double t = 0.0;
    std::vector<double> norm_plus;
    std::vector<double> norm_minus;
    std::vector<double> norm_total;

    double combined() const;
    double total() const;
};

struct PropagationResult {
    std::vector<BipolarState> snapshots;
    std::vector<std::size_t> snapshot_steps;
    std::vector<StepDiagnostics> diagnostics;
    std::size_t steps = 0;
};

/// Raised when a component's norm exceeds the instability guard or turns
/// non-finite.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(const std::string& what, double t, double norm)
        : std::runtime_error(what), t_(t), norm_(norm) {}
    double time() const { return t_; }
    double norm() const { return norm_; }

private:
    double t_;
    double norm_;
};

/// Fixed-step propagation from initial.t to initial.t + t_max. Snapshot times
/// are measured from initial.t.
PropagationResult propagate(const BipolarState& initial, const PotentialModel& potential,
                            const PropagationOptions& options);

}  // namespace bipolar
