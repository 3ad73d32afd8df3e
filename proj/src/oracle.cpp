#include "bipolar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"

namespace bipolar {

namespace {

// Per-node exp(-i V tau) for a real symmetric 2x2 matrix
// [[a, b], [b, d]]: exp(-i m tau) [cos(r tau) I - i sin(r tau)/r (V - m I)],
// m = (a + d)/2, r = sqrt(((a - d)/2)^2 + b^2).
struct Exp2 {
    Complex u11, u12, u22;
};

Exp2 exp_2x2(double a, double b, double d, double tau) {
    const double mean = 0.5 * (a + d);
    const double half = 0.5 * (a - d);
    const double r = std::hypot(half, b);
    const Complex global = std::polar(1.0, -mean * tau);
    const double c = std::cos(r * tau);
    // sin(r tau)/r, continuous at r = 0
    const double s = r * tau < 1e-8 ? tau * (1.0 - (r * tau) * (r * tau) / 6.0) : std::sin(r * tau) / r;
    const Complex minus_i{0.0, -1.0};
    return {global * (c + minus_i * s * half), global * (minus_i * s * b), global * (c - minus_i * s * half)};
}

}  // namespace

OracleResult unipolar_propagate(const std::vector<ComplexField>& psi0, const PotentialModel& potential, double mass,
                                const OracleOptions& options) {
    const std::size_t f = potential.n_surfaces();
    if (psi0.size() != f) throw std::invalid_argument("unipolar_propagate: surface count mismatch");
    if (f > 2) throw std::invalid_argument("unipolar_propagate: at most two surfaces supported");
    if (!(mass > 0.0)) throw std::invalid_argument("unipolar_propagate: mass must be positive");
    if (!(options.dt > 0.0)) throw std::invalid_argument("unipolar_propagate: dt must be positive");
    if (!(options.t_max >= 0.0)) throw std::invalid_argument("unipolar_propagate: t_max must be non-negative");
    const Grid g = psi0.front().grid();
    for (const auto& p : psi0)
        if (!(p.grid() == g)) throw std::invalid_argument("unipolar_propagate: surfaces on different grids");

    const std::size_t n = g.n_points;
    const double dt = options.dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(options.t_max / dt));

    std::vector<double> requested = options.snapshot_times;
    if (requested.empty()) requested = {0.0, options.t_max};
    std::vector<std::size_t> snap_steps;
    for (double t : requested) {
        if (t < -1e-9 || t > options.t_max * (1.0 + 1e-12) + 1e-9)
            throw std::invalid_argument("unipolar_propagate: snapshot time outside [0, t_max]");
        snap_steps.push_back(std::min(n_steps, static_cast<std::size_t>(std::llround(std::max(t, 0.0) / dt))));
    }
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    // Kinetic phase per FFT slot.
    std::vector<Complex> kinetic(n);
    const double dp = 2.0 * std::numbers::pi / (static_cast<double>(n) * g.dx);
    for (std::size_t s = 0; s < n; ++s) {
        const double index = s < (n + 1) / 2 ? static_cast<double>(s) : static_cast<double>(s) - static_cast<double>(n);
        const double p = index * dp;
        const double energy = options.dispersion == Dispersion::exact
                                  ? p * p / (2.0 * mass)
                                  : (2.0 - 2.0 * std::cos(p * g.dx)) / (2.0 * mass * g.dx * g.dx);
        kinetic[s] = std::polar(1.0 / static_cast<double>(n), -energy * dt);
    }

    // Half-step potential propagators.
    const auto sampled = potential.sample(g);
    std::vector<Exp2> half(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (f == 1) {
            const Complex u = std::polar(1.0, -sampled.v(0, 0)[k] * 0.5 * dt);
            half[k] = {u, Complex{}, Complex{}};
        } else {
            half[k] = exp_2x2(sampled.v(0, 0)[k], sampled.v(0, 1)[k], sampled.v(1, 1)[k], 0.5 * dt);
        }
    }

    std::vector<std::vector<Complex>> psi(f);
    for (std::size_t i = 0; i < f; ++i) psi[i].assign(psi0[i].values().begin(), psi0[i].values().end());

    auto potential_half = [&]() {
        if (f == 1) {
            for (std::size_t k = 0; k < n; ++k) psi[0][k] *= half[k].u11;
            return;
        }
        for (std::size_t k = 0; k < n; ++k) {
            const Complex a = psi[0][k];
            const Complex b = psi[1][k];
            psi[0][k] = half[k].u11 * a + half[k].u12 * b;
            psi[1][k] = half[k].u12 * a + half[k].u22 * b;
        }
    };

    detail::FftPlan plan(n);
    auto buffer = plan.buffer();
    auto kinetic_full = [&]() {
        for (std::size_t i = 0; i < f; ++i) {
            std::copy(psi[i].begin(), psi[i].end(), buffer.begin());
            plan.forward();
            for (std::size_t s = 0; s < n; ++s) buffer[s] *= kinetic[s];
            plan.backward();
            std::copy(buffer.begin(), buffer.end(), psi[i].begin());
        }
    };

    auto check_edges = [&](double t) {
        double peak = 0.0;
        double edge = 0.0;
        for (const auto& v : psi) {
            for (const auto& z : v) peak = std::max(peak, std::norm(z));
            edge = std::max({edge, std::norm(v.front()), std::norm(v.back())});
        }
        if (edge > options.edge_guard * peak) {
            std::ostringstream msg;
            msg << "oracle: edge density " << edge / peak << " of peak at t = " << t
                << " exceeds " << options.edge_guard << "; enlarge the grid";
            throw WraparoundError(msg.str());
        }
    };

    OracleResult result;
    result.steps = n_steps;
    auto next = snap_steps.begin();
    const std::size_t stride = std::max<std::size_t>(1, options.guard_stride);
    for (std::size_t step = 0;; ++step) {
        const double t = static_cast<double>(step) * dt;
        const bool snapshot = next != snap_steps.end() && *next == step;
        if (snapshot || step % stride == 0) check_edges(t);
        if (snapshot) {
            result.times.push_back(t);
            std::vector<ComplexField> fields;
            for (std::size_t i = 0; i < f; ++i) fields.emplace_back(g, psi[i]);
            result.snapshots.push_back(std::move(fields));
            ++next;
        }
        if (step == n_steps) break;
        potential_half();
        kinetic_full();
        potential_half();
    }
    return result;
}

double max_deviation(const BipolarState& state, const std::vector<ComplexField>& reference) {
    if (reference.size() != state.n_surfaces()) throw std::invalid_argument("max_deviation: surface count mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const auto& pair = state.surfaces[i];
        if (reference[i].size() != pair.plus.size()) throw std::invalid_argument("max_deviation: size mismatch");
        for (std::size_t k = 0; k < pair.plus.size(); ++k)
            worst = std::max(worst, std::abs(pair.plus[k] + pair.minus[k] - reference[i][k]));
    }
    return worst;
}

}  // namespace bipolar
