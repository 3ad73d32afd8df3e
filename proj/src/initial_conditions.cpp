#include "bipolar/initial_conditions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bipolar {

ComplexField gaussian_packet(const PacketSpec& spec, const Grid& grid) {
    if (!(spec.gamma > 0.0)) throw std::invalid_argument("gaussian_packet: gamma must be positive");
    if (!(spec.mass > 0.0)) throw std::invalid_argument("gaussian_packet: mass must be positive");
    if (!std::isfinite(spec.x0) || !std::isfinite(spec.p0))
        throw std::invalid_argument("gaussian_packet: non-finite x0 or p0");

    const double amplitude = std::pow(2.0 * spec.gamma / std::numbers::pi, 0.25);
    ComplexField psi(grid);
    for (std::size_t k = 0; k < grid.n_points; ++k) {
        const double x = grid.x(k);
        const double u = x - spec.x0;
        psi[k] = amplitude * std::exp(-spec.gamma * u * u) * std::polar(1.0, spec.p0 * x);
    }
    const double edge = std::max(std::abs(psi[0]), std::abs(psi[grid.n_points - 1]));
    if (edge >= 1e-8 * amplitude) {
        std::ostringstream msg;
        msg << "gaussian_packet: packet overlaps the grid edges (edge amplitude " << edge / amplitude
            << " of peak)";
        throw std::invalid_argument(msg.str());
    }
    return psi;
}

double minimum_momentum(double v_left, double v_right, double mass) {
    if (v_right < v_left) return 0.0;
    return std::sqrt(2.0 * mass * (v_right - v_left));
}

double negative_momentum_probability(const ComplexField& f, double p_min) {
    const auto spectrum = momentum_spectrum(f);
    const double dp = spectrum.dp;
    double prob = 0.0;
    for (std::size_t i = 0; i < spectrum.momenta.size(); ++i) {
        const double lower = spectrum.momenta[i] - 0.5 * dp;
        const double below = std::clamp((p_min - lower) / dp, 0.0, 1.0);
        prob += below * std::norm(spectrum.amplitudes[i]);
    }
    return prob * dp;
}

RightDecomposition right_decomposition(const ComplexField& f0, double v_left, double v_right, double mass,
                                       double tolerance) {
    if (!(mass > 0.0)) throw std::invalid_argument("right_decomposition: mass must be positive");
    const auto spectrum = momentum_spectrum(f0);
    const double threshold = 2.0 * mass * (v_right - v_left);  // p_R^2 = p_L^2 - threshold

    MomentumSpectrum plus = spectrum;
    MomentumSpectrum minus = spectrum;
    MomentumSpectrum kept = spectrum;
    double discarded = 0.0;
    for (std::size_t i = 0; i < spectrum.momenta.size(); ++i) {
        const double p_left = spectrum.momenta[i];
        const double p_right_sq = p_left * p_left - threshold;
        if (p_left <= 0.0 || p_right_sq <= 0.0) {
            discarded += std::norm(spectrum.amplitudes[i]);
            plus.amplitudes[i] = minus.amplitudes[i] = kept.amplitudes[i] = Complex{};
            continue;
        }
        const double ratio = p_left / std::sqrt(p_right_sq);
        plus.amplitudes[i] *= 0.5 * (1.0 + ratio);
        minus.amplitudes[i] *= 0.5 * (1.0 - ratio);
    }
    discarded *= spectrum.dp;
    if (discarded > 100.0 * tolerance) {
        std::ostringstream msg;
        msg << "right_decomposition: inadmissible probability " << discarded << " exceeds " << 100.0 * tolerance
            << " (raise p0 or reduce the momentum spread)";
        throw std::runtime_error(msg.str());
    }

    RightDecomposition out{inverse_momentum_spectrum(plus), inverse_momentum_spectrum(minus),
                           inverse_momentum_spectrum(kept), discarded};
    // Components obey the same Dirichlet contract as the propagated fields.
    for (ComplexField* f : {&out.plus, &out.minus, &out.projection}) {
        (*f)[0] = Complex{};
        (*f)[f->size() - 1] = Complex{};
    }
    return out;
}

BipolarState multisurface_initial(const ComplexField& f0, const PotentialModel& potential, double mass,
                                  std::size_t incident_surface, double v0_eff, double tolerance) {
    const std::size_t f = potential.n_surfaces();
    if (incident_surface >= f) throw std::invalid_argument("multisurface_initial: incident surface out of range");

    BipolarState state;
    state.mass = mass;
    state.surfaces.assign(f, ComponentPair{ComplexField(f0.grid()), ComplexField(f0.grid())});
    const double v_left = potential.left_asymptote(incident_surface);
    if (v0_eff == v_left) {
        state.surfaces[incident_surface].plus = f0;
    } else {
        auto split = right_decomposition(f0, v_left, v0_eff, mass, tolerance);
        state.surfaces[incident_surface].plus = std::move(split.plus);
        state.surfaces[incident_surface].minus = std::move(split.minus);
    }
    return state;
}

}  // namespace bipolar
