#include "bipolar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bipolar {

std::vector<SurfaceDensities> densities(const BipolarState& state) {
    std::vector<SurfaceDensities> out;
    for (const auto& pair : state.surfaces) {
        SurfaceDensities d;
        const std::size_t n = pair.plus.size();
        d.plus.resize(n);
        d.minus.resize(n);
        d.total.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            d.plus[k] = std::norm(pair.plus[k]);
            d.minus[k] = std::norm(pair.minus[k]);
            d.total[k] = std::norm(pair.plus[k] + pair.minus[k]);
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<double> flux(const ComplexField& psi, double mass) {
    const auto d = first_derivative(psi);
    std::vector<double> j(psi.size());
    for (std::size_t k = 0; k < psi.size(); ++k) j[k] = (std::conj(psi[k]) * d[k]).imag() / mass;
    return j;
}

std::vector<SurfaceFlux> component_flux(const BipolarState& state) {
    std::vector<SurfaceFlux> out;
    for (const auto& pair : state.surfaces) out.push_back({flux(pair.plus, state.mass), flux(pair.minus, state.mass)});
    return out;
}

double combined_probability(const BipolarState& state) {
    double sum = 0.0;
    for (const auto& pair : state.surfaces) sum += norm_squared(pair.plus) + norm_squared(pair.minus);
    return sum;
}

double total_probability(const BipolarState& state) {
    double sum = 0.0;
    for (const auto& pair : state.surfaces) sum += norm_squared(pair.total());
    return sum;
}

double DensityRateResidual::max() const {
    double m = 0.0;
    for (double v : plus) m = std::max(m, v);
    for (double v : minus) m = std::max(m, v);
    return m;
}

namespace {

std::vector<double> centered_difference(const std::vector<double>& f, double dx) {
    const std::size_t n = f.size();
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double right = k + 1 < n ? f[k + 1] : 0.0;
        const double left = k > 0 ? f[k - 1] : 0.0;
        d[k] = (right - left) / (2.0 * dx);
    }
    return d;
}

}  // namespace

DensityRateResidual density_rate_residual(const BipolarState& state, const RhsFields& rhs,
                                          const PotentialModel& potential) {
    if (potential.n_surfaces() != 1 || state.n_surfaces() != 1)
        throw std::invalid_argument("density_rate_residual: single-surface state required");
    if (rhs.surfaces.size() != 1) throw std::invalid_argument("density_rate_residual: rhs shape mismatch");
    const Grid& g = state.grid();
    const auto& pair = state.surfaces.front();
    const auto difference = cumulative_integral(pair.plus) - cumulative_integral(pair.minus);

    DensityRateResidual out;
    for (Sign s : {Sign::plus, Sign::minus}) {
        const auto& psi = pair[s];
        const auto& dpsi = rhs.surfaces.front()[s];
        const auto dj = centered_difference(flux(psi, state.mass), g.dx);
        const double sign = s == Sign::plus ? 1.0 : -1.0;
        std::vector<double> r(g.n_points);
        for (std::size_t k = 0; k < g.n_points; ++k) {
            const double rate = 2.0 * (std::conj(psi[k]) * dpsi[k]).real();
            const double source = sign * potential.derivative(g.x(k)) * (std::conj(psi[k]) * difference[k]).imag();
            r[k] = std::abs(rate - (-dj[k] + source));
        }
        (s == Sign::plus ? out.plus : out.minus) = std::move(r);
    }
    return out;
}

AmplitudePhase amplitude_phase(const ComplexField& psi, double relative_floor) {
    AmplitudePhase ap;
    ap.floor = relative_floor;
    const std::size_t n = psi.size();
    ap.amplitude.resize(n);
    ap.phase.assign(n, std::numeric_limits<double>::quiet_NaN());
    double peak = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        ap.amplitude[k] = std::abs(psi[k]);
        peak = std::max(peak, ap.amplitude[k]);
    }
    const double cutoff = relative_floor * peak;
    bool have_previous = false;
    double previous = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(ap.amplitude[k] > cutoff)) continue;
        double s = std::arg(psi[k]);
        if (have_previous) {
            const double two_pi = 2.0 * std::numbers::pi;
            s += two_pi * std::round((previous - s) / two_pi);
        }
        ap.phase[k] = s;
        previous = s;
        have_previous = true;
    }
    return ap;
}

ComplexField reconstruct(const AmplitudePhase& ap, const Grid& grid) {
    if (ap.amplitude.size() != grid.n_points) throw std::invalid_argument("reconstruct: size mismatch");
    ComplexField out(grid);
    for (std::size_t k = 0; k < grid.n_points; ++k)
        if (!std::isnan(ap.phase[k])) out[k] = std::polar(ap.amplitude[k], ap.phase[k]);
    return out;
}

std::vector<std::size_t> find_nodes(std::span<const double> rho, double depth, double shoulder) {
    std::vector<std::size_t> events;
    const std::size_t n = rho.size();
    if (n < 3) return events;
    const double peak = *std::max_element(rho.begin(), rho.end());
    if (!(peak > 0.0)) return events;

    std::vector<double> prefix(n), suffix(n);
    prefix[0] = rho[0];
    for (std::size_t k = 1; k < n; ++k) prefix[k] = std::max(prefix[k - 1], rho[k]);
    suffix[n - 1] = rho[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) suffix[k] = std::max(suffix[k + 1], rho[k]);

    const double low = depth * peak;
    const double high = shoulder * peak;
    std::size_t k = 1;
    while (k + 1 < n) {
        if (!(rho[k] < low && prefix[k - 1] > high && suffix[k + 1] > high)) {
            ++k;
            continue;
        }
        std::size_t deepest = k;
        while (k + 1 < n && rho[k] < low && prefix[k - 1] > high && suffix[k + 1] > high) {
            if (rho[k] < rho[deepest]) deepest = k;
            ++k;
        }
        events.push_back(deepest);
    }
    return events;
}

std::vector<NodeEvent> node_events(std::span<const BipolarState> snapshots, const ConditionThresholds& thresholds) {
    std::vector<NodeEvent> events;
    for (const auto& snap : snapshots) {
        const auto dens = densities(snap);
        for (std::size_t i = 0; i < dens.size(); ++i) {
            for (Sign s : {Sign::plus, Sign::minus}) {
                const auto& rho = s == Sign::plus ? dens[i].plus : dens[i].minus;
                const double peak = rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end());
                for (std::size_t k : find_nodes(rho, thresholds.node_depth, thresholds.node_shoulder))
                    events.push_back({snap.t, snap.grid().x(k), i, s, rho[k] / peak});
            }
        }
    }
    return events;
}

namespace {

// Trapezoid integrals of rho over [x_L, x_D] and [x_D, x_R], split at the node nearest x_D.
std::pair<double, double> split_integral(const std::vector<double>& rho, const Grid& g, double x_divide) {
    const std::size_t d = g.nearest_node(x_divide);
    std::span<const double> all(rho);
    return {integrate(all.first(d + 1), g.dx), integrate(all.subspan(d), g.dx)};
}

}  // namespace

ConditionReport check_conditions(std::span<const BipolarState> snapshots, const ConditionThresholds& thresholds) {
    if (snapshots.size() < 2) throw std::invalid_argument("check_conditions: need snapshots at t0 and tf");
    ConditionReport report;
    report.thresholds = thresholds;

    const auto& first = snapshots.front();
    const auto& last = snapshots.back();
    for (const auto& pair : first.surfaces)
        report.condition1.t0_purity = std::max(report.condition1.t0_purity, norm_squared(pair.minus));
    const auto final_dens = densities(last);
    for (const auto& d : final_dens) {
        const auto [minus_left, minus_right] = split_integral(d.minus, last.grid(), thresholds.x_divide);
        const auto [plus_left, plus_right] = split_integral(d.plus, last.grid(), thresholds.x_divide);
        (void)minus_left;
        (void)plus_right;
        report.condition1.tf_minus_right.push_back(minus_right);
        report.condition1.tf_plus_left.push_back(plus_left);
        report.condition1.tf_separation = std::max({report.condition1.tf_separation, minus_right, plus_left});
    }
    report.condition1_pass = report.condition1.t0_purity < thresholds.separation &&
                             report.condition1.tf_separation < thresholds.separation;

    for (const auto& snap : snapshots) {
        const std::size_t n = snap.grid().n_points;
        const auto tail = static_cast<std::size_t>(std::ceil(thresholds.tail_fraction * static_cast<double>(n)));
        const std::size_t tail_start = n - std::min(n, std::max<std::size_t>(tail, 1));
        double worst = 0.0;
        for (const auto& pair : snap.surfaces) {
            for (Sign s : {Sign::plus, Sign::minus}) {
                const auto big = cumulative_integral(pair[s]);
                double peak = 0.0;
                double tail_peak = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double a = std::abs(big[k]);
                    peak = std::max(peak, a);
                    if (k >= tail_start) tail_peak = std::max(tail_peak, a);
                }
                if (peak > 0.0) worst = std::max(worst, tail_peak / peak);
            }
        }
        report.condition2.max_tail_ratio.push_back(worst);
        report.condition2.worst = std::max(report.condition2.worst, worst);
    }
    report.condition2_pass = report.condition2.worst < thresholds.localization;

    report.condition3.events = node_events(snapshots, thresholds);
    report.condition3_pass = report.condition3.events.empty();
    return report;
}

std::vector<BranchProbabilities> reflection_transmission(const BipolarState& final_state, double x_divide,
                                                         double separation_threshold) {
    std::vector<BranchProbabilities> out;
    const auto dens = densities(final_state);
    const Grid& g = final_state.grid();
    for (const auto& d : dens) {
        BranchProbabilities b;
        b.reflection = integrate(std::span<const double>(d.minus), g.dx);
        b.transmission = integrate(std::span<const double>(d.plus), g.dx);
        const double minus_right = split_integral(d.minus, g, x_divide).second;
        const double plus_left = split_integral(d.plus, g, x_divide).first;
        b.separated = minus_right < separation_threshold && plus_left < separation_threshold;
        out.push_back(b);
    }
    return out;
}

double centroid(const ComplexField& psi) {
    const Grid& g = psi.grid();
    std::vector<double> rho(psi.size()), xrho(psi.size());
    for (std::size_t k = 0; k < psi.size(); ++k) {
        rho[k] = std::norm(psi[k]);
        xrho[k] = g.x(k) * rho[k];
    }
    const double mass = integrate(std::span<const double>(rho), g.dx);
    if (!(mass > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return integrate(std::span<const double>(xrho), g.dx) / mass;
}

std::optional<double> stage_transition_time(std::span<const BipolarState> snapshots, std::size_t surface,
                                            Sign component, const StageOptions& options) {
    const std::size_t n = snapshots.size();
    if (n < 10) return std::nullopt;
    std::vector<double> c(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& psi = snapshots[i].surfaces.at(surface)[component];
        p[i] = norm_squared(psi);
        c[i] = centroid(psi);
    }
    // speed[i] spans snapshots i-1 .. i; NaN where the component is absent.
    std::vector<double> speed(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 1; i < n; ++i) {
        if (p[i] > options.min_probability && p[i - 1] > options.min_probability)
            speed[i] = std::abs(c[i] - c[i - 1]) / (snapshots[i].t - snapshots[i - 1].t);
    }
    const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(options.final_window * static_cast<double>(n - 1))));
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = n - window; i < n; ++i) {
        if (!std::isnan(speed[i])) {
            sum += speed[i];
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    const double reference = sum / static_cast<double>(count);
    for (std::size_t i = 1; i < n; ++i)
        if (!std::isnan(speed[i]) && speed[i] > options.speed_fraction * reference) return snapshots[i].t;
    return std::nullopt;
}

std::optional<double> peak_coincidence_time(std::span<const BipolarState> snapshots, std::size_t surface,
                                            double min_probability) {
    for (const auto& snap : snapshots) {
        const auto& pair = snap.surfaces.at(surface);
        if (!(norm_squared(pair.plus) > min_probability && norm_squared(pair.minus) > min_probability)) continue;
        auto peak_of = [](const ComplexField& f) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < f.size(); ++k)
                if (std::norm(f[k]) > std::norm(f[best])) best = k;
            return best;
        };
        if (peak_of(pair.plus) >= peak_of(pair.minus)) return snap.t;
    }
    return std::nullopt;
}

}  // namespace bipolar
