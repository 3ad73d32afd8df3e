#include "bipolar/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bipolar {

BipolarState BipolarState::incident(const ComplexField& psi0, double mass, double t) {
    BipolarState s;
    s.surfaces.push_back({psi0, ComplexField(psi0.grid())});
    s.t = t;
    s.mass = mass;
    return s;
}

void BipolarState::check_consistent() const {
    if (surfaces.empty()) throw std::invalid_argument("BipolarState: no surfaces");
    const Grid& g = surfaces.front().plus.grid();
    for (const auto& pair : surfaces) {
        if (!(pair.plus.grid() == g) || !(pair.minus.grid() == g))
            throw std::invalid_argument("BipolarState: components live on different grids");
        if (pair.plus.size() != g.n_points || pair.minus.size() != g.n_points)
            throw std::invalid_argument("BipolarState: component length does not match grid");
    }
}

BipolarEngine::BipolarEngine(const PotentialModel& potential, const Grid& grid, double mass)
    : grid_(grid), mass_(mass), sampled_(potential.sample(grid)) {
    if (!(mass > 0.0)) throw std::invalid_argument("BipolarEngine: mass must be positive");
    difference_.assign(sampled_.n_surfaces, std::vector<Complex>(grid.n_points));
    scratch_.resize(grid.n_points);
    laplacian_.resize(grid.n_points);
}

namespace {

void shape_like(const BipolarState& state, RhsFields& out) {
    const Grid& g = state.grid();
    if (out.surfaces.size() == state.n_surfaces() && !out.surfaces.empty() && out.surfaces.front().plus.grid() == g)
        return;
    out.surfaces.assign(state.n_surfaces(), ComponentPair{ComplexField(g), ComplexField(g)});
}

// -i * z
inline Complex times_minus_i(Complex z) { return {z.imag(), -z.real()}; }

}  // namespace

void BipolarEngine::evaluate(const BipolarState& state, RhsFields& out) {
    const std::size_t f = sampled_.n_surfaces;
    if (state.n_surfaces() != f) {
        std::ostringstream msg;
        msg << "bipolar rhs: state has " << state.n_surfaces() << " surfaces, potential has " << f;
        throw std::invalid_argument(msg.str());
    }
    if (!(state.grid() == grid_)) throw std::invalid_argument("bipolar rhs: state grid differs from engine grid");
    shape_like(state, out);

    const std::size_t n = grid_.n_points;
    const double dx = grid_.dx;

    for (std::size_t j = 0; j < f; ++j) {
        auto& d = difference_[j];
        cumulative_integral(state.surfaces[j].plus.values(), dx, d);
        cumulative_integral(state.surfaces[j].minus.values(), dx, scratch_);
        for (std::size_t k = 0; k < n; ++k) d[k] -= scratch_[k];
    }

    const double kinetic = -0.5 / mass_;
    for (std::size_t i = 0; i < f; ++i) {
        for (Sign sign : {Sign::plus, Sign::minus}) {
            second_derivative(state.surfaces[i][sign].values(), dx, laplacian_);
            auto result = out.surfaces[i][sign].values();
            for (std::size_t k = 0; k < n; ++k) {
                Complex h = kinetic * laplacian_[k];
                for (std::size_t j = 0; j < f; ++j) h += sampled_.v(i, j)[k] * state.surfaces[j][sign][k];
                Complex coupling{};
                for (std::size_t j = 0; j < f; ++j) coupling += sampled_.dv(i, j)[k] * difference_[j][k];
                coupling *= 0.5;
                h = sign == Sign::plus ? h + coupling : h - coupling;
                result[k] = times_minus_i(h);
            }
        }
    }
}

RhsFields BipolarEngine::evaluate(const BipolarState& state) {
    RhsFields out;
    evaluate(state, out);
    return out;
}

std::vector<ComplexField> BipolarEngine::unipolar_rhs(const std::vector<ComplexField>& psi) const {
    const std::size_t f = sampled_.n_surfaces;
    if (psi.size() != f) throw std::invalid_argument("unipolar_rhs: surface count mismatch");
    const std::size_t n = grid_.n_points;
    const double kinetic = -0.5 / mass_;
    std::vector<ComplexField> out;
    std::vector<Complex> lap(n);
    for (std::size_t i = 0; i < f; ++i) {
        second_derivative(psi[i].values(), grid_.dx, lap);
        ComplexField r(grid_);
        for (std::size_t k = 0; k < n; ++k) {
            Complex h = kinetic * lap[k];
            for (std::size_t j = 0; j < f; ++j) h += sampled_.v(i, j)[k] * psi[j][k];
            r[k] = times_minus_i(h);
        }
        out.push_back(std::move(r));
    }
    return out;
}

RhsFields bipolar_rhs(const BipolarState& state, const PotentialModel& potential) {
    if (potential.n_surfaces() != 1) throw std::invalid_argument("bipolar_rhs: single-surface potential required");
    state.check_consistent();
    BipolarEngine engine(potential, state.grid(), state.mass);
    return engine.evaluate(state);
}

RhsFields multisurface_rhs(const BipolarState& state, const PotentialModel& potential) {
    state.check_consistent();
    if (state.n_surfaces() != potential.n_surfaces())
        throw std::invalid_argument("multisurface_rhs: state and potential surface counts differ");
    BipolarEngine engine(potential, state.grid(), state.mass);
    return engine.evaluate(state);
}

namespace {

void clamp_edges(ComplexField& f) {
    f[0] = Complex{};
    f[f.size() - 1] = Complex{};
}

// y <- base + a * r, component-wise, edges clamped.
void combine(BipolarState& y, const BipolarState& base, double a, const RhsFields& r) {
    for (std::size_t i = 0; i < y.surfaces.size(); ++i) {
        for (Sign s : {Sign::plus, Sign::minus}) {
            auto out = y.surfaces[i][s].values();
            const auto in = base.surfaces[i][s].values();
            const auto d = r.surfaces[i][s].values();
            for (std::size_t k = 0; k < out.size(); ++k) out[k] = in[k] + a * d[k];
            clamp_edges(y.surfaces[i][s]);
        }
    }
}

}  // namespace

BipolarState euler_step(const BipolarState& state, const RhsFields& rhs, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("euler_step: dt must be positive");
    if (rhs.surfaces.size() != state.surfaces.size()) throw std::invalid_argument("euler_step: shape mismatch");
    BipolarState next = state;
    combine(next, state, dt, rhs);
    next.t = state.t + dt;
    return next;
}

double StepDiagnostics::combined() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < norm_plus.size(); ++i) sum += norm_plus[i] + norm_minus[i];
    return sum;
}

double StepDiagnostics::total() const {
    double sum = 0.0;
    for (double v : norm_total) sum += v;
    return sum;
}

namespace {

StepDiagnostics measure(const BipolarState& state, std::size_t step) {
    StepDiagnostics d;
    d.step = step;
    d.t = state.t;
    for (const auto& pair : state.surfaces) {
        d.norm_plus.push_back(norm_squared(pair.plus));
        d.norm_minus.push_back(norm_squared(pair.minus));
        d.norm_total.push_back(norm_squared(pair.total()));
    }
    return d;
}

void guard(const StepDiagnostics& d, double limit) {
    for (std::size_t i = 0; i < d.norm_plus.size(); ++i) {
        for (double v : {d.norm_plus[i], d.norm_minus[i]}) {
            if (!std::isfinite(v) || v > limit) {
                std::ostringstream msg;
                msg << "propagation unstable at t = " << d.t << " (step " << d.step << "): surface " << i + 1
                    << " component norm^2 = " << v << " exceeds " << limit
                    << "; reduce dt or coarsen the grid";
                throw InstabilityError(msg.str(), d.t, v);
            }
        }
    }
}

}  // namespace

PropagationResult propagate(const BipolarState& initial, const PotentialModel& potential,
                            const PropagationOptions& options) {
    initial.check_consistent();
    if (!(options.dt > 0.0) || !std::isfinite(options.dt)) throw std::invalid_argument("propagate: dt must be positive");
    if (!(options.t_max >= 0.0) || !std::isfinite(options.t_max))
        throw std::invalid_argument("propagate: t_max must be finite and non-negative");

    const double dt = options.dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(options.t_max / dt));
    const double slack = 1e-9 * std::max(1.0, options.t_max);

    std::vector<double> requested = options.snapshot_times;
    if (requested.empty()) requested = {0.0, options.t_max};
    std::vector<std::size_t> snapshot_steps;
    for (double t : requested) {
        if (!std::isfinite(t) || t < -slack || t > options.t_max + slack)
            throw std::invalid_argument("propagate: snapshot time outside [0, t_max]");
        snapshot_steps.push_back(std::min(n_steps, static_cast<std::size_t>(std::llround(std::max(t, 0.0) / dt))));
    }
    std::sort(snapshot_steps.begin(), snapshot_steps.end());
    snapshot_steps.erase(std::unique(snapshot_steps.begin(), snapshot_steps.end()), snapshot_steps.end());

    BipolarEngine engine(potential, initial.grid(), initial.mass);
    const std::size_t stride = std::max<std::size_t>(1, options.diagnostics_stride);

    PropagationResult result;
    result.steps = n_steps;
    result.snapshot_steps = snapshot_steps;

    BipolarState state = initial;
    BipolarState stage = initial;
    BipolarState accum = initial;
    RhsFields k1, k2, k3, k4;
    auto next_snapshot = snapshot_steps.begin();
    const double t0 = initial.t;

    for (std::size_t step = 0;; ++step) {
        state.t = t0 + static_cast<double>(step) * dt;
        if (step % stride == 0 || step == n_steps) {
            result.diagnostics.push_back(measure(state, step));
            guard(result.diagnostics.back(), options.norm_limit);
        }
        if (next_snapshot != snapshot_steps.end() && *next_snapshot == step) {
            result.snapshots.push_back(state);
            ++next_snapshot;
        }
        if (step == n_steps) break;

        if (options.stepper == Stepper::forward_euler) {
            engine.evaluate(state, k1);
            combine(state, state, dt, k1);
        } else {
            engine.evaluate(state, k1);
            combine(stage, state, 0.5 * dt, k1);
            engine.evaluate(stage, k2);
            combine(stage, state, 0.5 * dt, k2);
            engine.evaluate(stage, k3);
            combine(stage, state, dt, k3);
            engine.evaluate(stage, k4);
            combine(accum, state, dt / 6.0, k1);
            combine(accum, accum, dt / 3.0, k2);
            combine(accum, accum, dt / 3.0, k3);
            combine(state, accum, dt / 6.0, k4);
        }
    }
    return result;
}

}  // namespace bipolar
