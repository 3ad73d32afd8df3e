#pragma once

#include <cstddef>

#include "bipolar/numerics.hpp"
#include "bipolar/potentials.hpp"
#include "bipolar/state.hpp"

namespace bipolar {

/// Gaussian packet (2 gamma/pi)^(1/4) exp(-gamma (x - x0)^2) exp(i p0 x).
struct PacketSpec {
    double gamma = 0.35;
    double x0 = -7.0;
    double p0 = 0.0;
    double mass = 2000.0;
    double t0 = 0.0;
};

/// Throws std::invalid_argument for gamma <= 0, mass <= 0, or a packet whose
/// edge amplitude exceeds 1e-8 of its peak.
ComplexField gaussian_packet(const PacketSpec& spec, const Grid& grid);

/// Smallest admissible left-incident momentum: 0 if V_R < V_L, otherwise
/// sqrt(2 m (V_R - V_L)).
double minimum_momentum(double v_left, double v_right, double mass);

/// Probability carried by momenta below p_min, integrated over the discrete
/// spectrum with each bin treated as a cell of width dp (a bin centred on
/// p_min counts half).
double negative_momentum_probability(const ComplexField& f, double p_min = 0.0);

struct RightDecomposition {
    ComplexField plus;
    ComplexField minus;
    /// The admissible part of f0 (all bins with p_L > p_min); equals plus + minus.
    ComplexField projection;
    /// Probability in the zeroed bins.
    double discarded_probability = 0.0;
};

/// Decomposition of a left-incident packet relative to a constant effective
/// potential V_R. Each momentum bin with p_L > 0 and V_L + p_L^2/2m > max(V_L, V_R)
/// is split with weights (1 +- p_L/p_R)/2, p_R = sqrt(p_L^2 - 2m (V_R - V_L));
/// all other bins are dropped. Throws std::runtime_error when the dropped
/// probability exceeds 100 * tolerance.
RightDecomposition right_decomposition(const ComplexField& f0, double v_left, double v_right, double mass,
                                       double tolerance = 1e-6);

/// Initial state for an f-surface run, incident on `incident_surface`
/// (0-based). With v0_eff equal to that surface's left asymptote the incident
/// surface gets (f0, 0) exactly; otherwise it is split by right_decomposition.
BipolarState multisurface_initial(const ComplexField& f0, const PotentialModel& potential, double mass,
                                  std::size_t incident_surface, double v0_eff, double tolerance = 1e-6);

}  // namespace bipolar
