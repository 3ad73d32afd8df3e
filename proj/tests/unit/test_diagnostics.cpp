#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bipolar/diagnostics.hpp"
#include "bipolar/initial_conditions.hpp"
#include "bipolar/propagator.hpp"

using namespace bipolar;

namespace {

BipolarState two_packets(const Grid& g, double mass) {
    BipolarState s;
    s.mass = mass;
    s.surfaces.push_back({gaussian_packet({1.0, -2.0, 1.5, mass, 0.0}, g),
                          0.5 * gaussian_packet({2.0, 1.0, -1.0, mass, 0.0}, g)});
    return s;
}

// Packet with density centred at x(t), split as plus = a psi, minus = (1 - a) psi.
BipolarState translating(const Grid& g, double t, double x, double a) {
    const auto psi = gaussian_packet({1.0, x, 0.0, 1.0, 0.0}, g);
    BipolarState s;
    s.t = t;
    s.surfaces.push_back({Complex{a, 0.0} * psi, Complex{1.0 - a, 0.0} * psi});
    return s;
}

}  // namespace

TEST_CASE("densities and probabilities at the initial time") {
    const auto g = make_grid(-20.0, 20.0, 801);
    const auto psi0 = gaussian_packet({0.35, -7.0, 3.0, 2000.0, 0.0}, g);
    const auto s = BipolarState::incident(psi0, 2000.0);
    const auto d = densities(s);
    REQUIRE(d.size() == 1);
    for (std::size_t k = 0; k < g.n_points; ++k) {
        CHECK(d[0].minus[k] == 0.0);
        CHECK(d[0].total[k] == d[0].plus[k]);
    }
    CHECK(combined_probability(s) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(total_probability(s) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("flux of a plane-wave packet is velocity times density") {
    const auto g = make_grid(-20.0, 20.0, 4001);
    const double p0 = 2.0, m = 3.0;
    const auto psi = gaussian_packet({0.1, 0.0, p0, m, 0.0}, g);
    const auto j = flux(psi, m);
    const std::size_t mid = g.nearest_node(0.0);
    CHECK(j[mid] == doctest::Approx(p0 / m * std::norm(psi[mid])).epsilon(0.01));
    const auto jc = component_flux(BipolarState::incident(psi, m));
    CHECK(jc[0].plus[mid] == j[mid]);
    CHECK(jc[0].minus[mid] == 0.0);
}

TEST_CASE("local density balance residual converges at second order") {
    const auto v = eckart(0.5, 1.0);
    auto residual = [&](std::size_t n) {
        const auto g = make_grid(-12.0, 12.0, n);
        const auto s = two_packets(g, 1.0);
        return density_rate_residual(s, bipolar_rhs(s, v), v).max();
    };
    const double coarse = residual(481), fine = residual(961);
    CHECK(coarse / fine > std::pow(2.0, 1.9));
    CHECK(fine < 5e-3);
}

TEST_CASE("amplitude and phase round trip") {
    const auto g = make_grid(-10.0, 10.0, 401);
    const auto psi = gaussian_packet({0.5, 0.0, 4.0, 1.0, 0.0}, g);
    const auto ap = amplitude_phase(psi);
    const auto back = reconstruct(ap, g);
    // Exact above the floor; below it the field is dropped.
    const double cutoff = ap.floor * psi.max_abs();
    double worst = 0.0, dropped = 0.0;
    for (std::size_t k = 0; k < g.n_points; ++k) {
        const double gap = std::abs(back[k] - psi[k]);
        double& slot = std::abs(psi[k]) > cutoff ? worst : dropped;
        slot = std::max(slot, gap);
    }
    CHECK(worst < 1e-12);
    CHECK(dropped <= cutoff);

    // Unwrapped phase of exp(i p0 x) grows linearly.
    const std::size_t a = g.nearest_node(-1.0), b = g.nearest_node(1.0);
    CHECK(ap.phase[b] - ap.phase[a] == doctest::Approx(4.0 * (g.x(b) - g.x(a))).epsilon(1e-9));
    CHECK(std::isnan(ap.phase[0]));
}

TEST_CASE("node detector") {
    const auto g = make_grid(-10.0, 10.0, 2001);
    std::vector<double> gaussian(g.n_points), fringes(g.n_points);
    for (std::size_t k = 0; k < g.n_points; ++k) {
        const double x = g.x(k);
        gaussian[k] = std::exp(-0.5 * x * x);
        fringes[k] = gaussian[k] * std::pow(std::cos(2.0 * x), 2);
    }
    CHECK(find_nodes(gaussian, 1e-4, 1e-2).empty());
    // cos(2x) vanishes at odd multiples of pi/4; those with the envelope above
    // 1e-2 on both sides lie within |x| < 3.
    const auto nodes = find_nodes(fringes, 1e-4, 1e-2);
    CHECK(nodes.size() == 4);
    for (std::size_t k : nodes) CHECK(std::abs(std::cos(2.0 * g.x(k))) < 0.02);

    std::vector<double> zero(g.n_points, 0.0);
    CHECK(find_nodes(zero, 1e-4, 1e-2).empty());
}

TEST_CASE("separation conditions and branches") {
    const auto g = make_grid(-30.0, 30.0, 1201);
    BipolarState t0 = BipolarState::incident(gaussian_packet({0.35, -7.0, 3.0, 1.0, 0.0}, g), 1.0);
    BipolarState tf = BipolarState::incident(gaussian_packet({0.35, 8.0, 3.0, 1.0, 0.0}, g), 1.0, 5.0);
    const std::vector<BipolarState> snaps{t0, tf};
    const auto report = check_conditions(snaps);
    CHECK(report.condition1_pass);
    CHECK(report.condition1.t0_purity == 0.0);
    CHECK(report.condition3_pass);
    CHECK(report.condition3.events.empty());
    REQUIRE(report.condition2.max_tail_ratio.size() == 2);

    const auto branches = reflection_transmission(tf);
    CHECK(branches[0].reflection == 0.0);
    CHECK(branches[0].transmission == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(branches[0].separated);

    const std::vector<BipolarState> one{t0};
    CHECK_THROWS_AS(check_conditions(one), std::invalid_argument);

    SUBCASE("misplaced probability fails condition 1") {
        auto wrong = tf;
        std::swap(wrong.surfaces[0].plus, wrong.surfaces[0].minus);
        const std::vector<BipolarState> bad{t0, wrong};
        const auto r = check_conditions(bad);
        CHECK_FALSE(r.condition1_pass);
        CHECK(r.condition1.tf_minus_right[0] == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("stage transition and peak coincidence") {
    const auto g = make_grid(-20.0, 20.0, 801);

    SUBCASE("stationary packet has no transition") {
        std::vector<BipolarState> snaps;
        for (int i = 0; i < 20; ++i) snaps.push_back(translating(g, i, 0.0, 0.5));
        CHECK_FALSE(stage_transition_time(snaps).has_value());
    }
    SUBCASE("first moving interval of an accelerating packet") {
        // Still for t < 5, then uniform motion.
        std::vector<BipolarState> snaps;
        for (int i = 0; i <= 20; ++i) snaps.push_back(translating(g, i, i < 5 ? -6.0 : -6.0 + 0.5 * (i - 5), 0.5));
        const auto t = stage_transition_time(snaps);
        REQUIRE(t.has_value());
        CHECK(*t == 6.0);
    }
    SUBCASE("too few snapshots") {
        std::vector<BipolarState> snaps;
        for (int i = 0; i < 5; ++i) snaps.push_back(translating(g, i, 0.1 * i, 0.5));
        CHECK_FALSE(stage_transition_time(snaps).has_value());
    }
    SUBCASE("peaks coincide when plus catches up") {
        std::vector<BipolarState> snaps;
        for (int i = 0; i < 6; ++i) {
            BipolarState s;
            s.t = i;
            s.surfaces.push_back({gaussian_packet({1.0, -5.0 + 2.0 * i, 0.0, 1.0, 0.0}, g),
                                  gaussian_packet({1.0, 0.0, 0.0, 1.0, 0.0}, g)});
            snaps.push_back(s);
        }
        const auto t = peak_coincidence_time(snaps);
        REQUIRE(t.has_value());
        CHECK(*t == 3.0);
    }
    CHECK(std::isnan(centroid(ComplexField(g))));
}
