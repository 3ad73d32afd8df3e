#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bipolar/potentials.hpp"
#include "bipolar/state.hpp"

namespace bipolar {

enum class Dispersion {
    exact,              // p^2 / 2m
    finite_difference,  // (2 - 2 cos(p dx)) / (2 m dx^2), the engine's stencil symbol
};

struct OracleOptions {
    double dt = 0.01;
    double t_max = 0.0;
    std::vector<double> snapshot_times;  // empty means {0, t_max}
    Dispersion dispersion = Dispersion::exact;
    double edge_guard = 1e-6;
    std::size_t guard_stride = 10;
};

struct OracleResult {
    std::vector<double> times;
    std::vector<std::vector<ComplexField>> snapshots;  // [snapshot][surface]
    std::size_t steps = 0;
};

/// The periodic transform has let density reach the grid edges.
class WraparoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Strang split-step Fourier propagation of the ordinary (matrix)
/// Schroedinger equation on the same periodic grid: half potential step,
/// full kinetic step in momentum space, half potential step. The potential
/// step is exact per node for f = 1 and f = 2.
OracleResult unipolar_propagate(const std::vector<ComplexField>& psi0, const PotentialModel& potential, double mass,
                                const OracleOptions& options);

/// Largest node-wise |psi_+ + psi_- - psi_oracle| over all surfaces.
double max_deviation(const BipolarState& state, const std::vector<ComplexField>& reference);

}  // namespace bipolar
