#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bipolar/diagnostics.hpp"
#include "bipolar/initial_conditions.hpp"
#include "bipolar/oracle.hpp"
#include "bipolar/propagator.hpp"

using namespace bipolar;

namespace {

Complex free_gaussian(double x, double t, const PacketSpec& s) {
    const Complex spread{1.0, 2.0 * s.gamma * t / s.mass};
    const double u = x - s.x0 - s.p0 * t / s.mass;
    return std::pow(2.0 * s.gamma / std::numbers::pi, 0.25) / std::sqrt(spread) *
           std::exp(-s.gamma * u * u / spread + Complex{0.0, s.p0 * x - s.p0 * s.p0 * t / (2.0 * s.mass)});
}

double max_gap(const ComplexField& a, const ComplexField& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

// Transmission through V0 sech^2(alpha x) for momentum p, valid for 8 m V0 > alpha^2.
double eckart_transmission(double p, double v0, double alpha, double mass) {
    const double s = std::sinh(std::numbers::pi * p / alpha);
    const double c = std::cosh(0.5 * std::numbers::pi * std::sqrt(8.0 * mass * v0 / (alpha * alpha) - 1.0));
    return s * s / (s * s + c * c);
}

}  // namespace

TEST_CASE("free Gaussian matches the closed form") {
    const auto g = make_grid(-30.0, 30.0, 601);
    const PacketSpec spec{0.5, -2.0, 0.5, 100.0, 0.0};
    OracleOptions o;
    o.dt = 0.01;
    o.t_max = 100.0;
    const auto r = unipolar_propagate({gaussian_packet(spec, g)}, free_particle(), spec.mass, o);
    REQUIRE(r.snapshots.size() == 2);
    CHECK(r.times.back() == doctest::Approx(100.0));
    double worst = 0.0;
    for (std::size_t k = 0; k < g.n_points; ++k)
        worst = std::max(worst, std::abs(r.snapshots.back()[0][k] - free_gaussian(g.x(k), 100.0, spec)));
    CHECK(worst < 1e-8);
}

TEST_CASE("split-step error is second order in dt and conserves the norm") {
    const auto g = make_grid(-25.0, 25.0, 501);
    const auto psi0 = gaussian_packet({0.5, -5.0, 2.0, 1.0, 0.0}, g);
    const auto v = eckart(1.5, 1.0);
    auto final_for = [&](double dt) {
        OracleOptions o;
        o.dt = dt;
        o.t_max = 4.0;
        return unipolar_propagate({psi0}, v, 1.0, o).snapshots.back()[0];
    };
    const auto reference = final_for(0.00125);
    const double e1 = max_gap(final_for(0.02), reference);
    const double e2 = max_gap(final_for(0.01), reference);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
    // 3200 unitary steps; only roundoff accumulates.
    CHECK(std::abs(norm_squared(reference) - norm_squared(psi0)) < 1e-11);
}

TEST_CASE("averaged Eckart transmission matches the analytic coefficient") {
    const double m = 1.0, v0 = 2.0, alpha = 1.0;
    const PacketSpec spec{0.25, -15.0, 2.0, m, 0.0};
    const auto g = make_grid(-80.0, 80.0, 3201);
    OracleOptions o;
    o.dt = 0.005;
    o.t_max = 15.0;
    const auto r = unipolar_propagate({gaussian_packet(spec, g)}, eckart(v0, alpha), m, o);
    const auto& psi = r.snapshots.back()[0];
    double transmitted = 0.0;
    for (std::size_t k = 0; k < g.n_points; ++k)
        if (g.x(k) > 0.0) transmitted += std::norm(psi[k]) * g.dx;

    // |phi(p)|^2 is a normal density with variance gamma.
    const double sigma = std::sqrt(spec.gamma);
    double expected = 0.0;
    const double dp = 1e-3;
    for (double p = spec.p0 - 10.0 * sigma; p <= spec.p0 + 10.0 * sigma; p += dp) {
        if (p <= 0.0) continue;
        const double u = (p - spec.p0) / sigma;
        expected += std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi)) *
                    eckart_transmission(p, v0, alpha, m) * dp;
    }
    CHECK(transmitted == doctest::Approx(expected).epsilon(2e-3));
}

TEST_CASE("finite-difference dispersion tracks the bipolar totals") {
    const auto g = make_grid(-20.0, 20.0, 401);
    const auto psi0 = gaussian_packet({0.5, -5.0, 2.0, 1.0, 0.0}, g);
    const auto v = eckart(1.5, 1.0);
    OracleOptions o;
    o.dt = 0.002;
    o.t_max = 3.0;
    o.dispersion = Dispersion::finite_difference;
    const auto oracle = unipolar_propagate({psi0}, v, 1.0, o);

    PropagationOptions p;
    p.dt = 0.002;
    p.t_max = 3.0;
    p.stepper = Stepper::runge_kutta4;
    const auto bipolar = propagate(BipolarState::incident(psi0, 1.0), v, p);
    CHECK(max_deviation(bipolar.snapshots.back(), oracle.snapshots.back()) < 1e-5);
}

TEST_CASE("two uncoupled surfaces evolve independently") {
    const auto g = make_grid(-20.0, 20.0, 401);
    const auto psi0 = gaussian_packet({0.5, -5.0, 2.0, 1.0, 0.0}, g);
    OracleOptions o;
    o.dt = 0.01;
    o.t_max = 2.0;
    const auto two = unipolar_propagate({psi0, ComplexField(g)}, two_surface(1.5, 0.0, 1.0), 1.0, o);
    const auto one = unipolar_propagate({psi0}, eckart(1.5, 1.0), 1.0, o);
    CHECK(two.snapshots.back()[1].max_abs() == 0.0);
    CHECK(max_gap(two.snapshots.back()[0], one.snapshots.back()[0]) < 1e-14);

    const auto coupled = unipolar_propagate({psi0, ComplexField(g)}, two_surface(1.5, 0.5, 1.0), 1.0, o);
    CHECK(coupled.snapshots.back()[1].max_abs() > 1e-3);
    const double total = norm_squared(coupled.snapshots.back()[0]) + norm_squared(coupled.snapshots.back()[1]);
    CHECK(total == doctest::Approx(norm_squared(psi0)).epsilon(1e-12));
}

TEST_CASE("oracle refuses to run into the periodic boundary") {
    const auto g = make_grid(-10.0, 10.0, 201);
    const auto psi0 = gaussian_packet({1.0, 0.0, 5.0, 1.0, 0.0}, g);
    OracleOptions o;
    o.dt = 0.01;
    o.t_max = 5.0;
    CHECK_THROWS_AS(unipolar_propagate({psi0}, free_particle(), 1.0, o), WraparoundError);
    CHECK_THROWS_AS(unipolar_propagate({psi0, psi0}, eckart(1.0, 1.0), 1.0, o), std::invalid_argument);
}
