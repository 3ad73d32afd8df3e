#include "bipolar/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace bipolar {

PotentialModel::PotentialModel(std::string name, std::size_t n_surfaces, std::vector<Element> upper,
                               std::vector<double> left_asymptotes, std::vector<double> right_asymptotes,
                               std::vector<std::pair<std::string, double>> parameters)
    : name_(std::move(name)),
      n_surfaces_(n_surfaces),
      upper_(std::move(upper)),
      left_(std::move(left_asymptotes)),
      right_(std::move(right_asymptotes)),
      parameters_(std::move(parameters)) {
    if (n_surfaces_ == 0) throw std::invalid_argument("PotentialModel: need at least one surface");
    if (upper_.size() != n_surfaces_ * (n_surfaces_ + 1) / 2)
        throw std::invalid_argument("PotentialModel: wrong number of upper-triangle elements");
    if (left_.size() != n_surfaces_ || right_.size() != n_surfaces_)
        throw std::invalid_argument("PotentialModel: one asymptote per surface is required");
}

const PotentialModel::Element& PotentialModel::element(std::size_t i, std::size_t j) const {
    if (i >= n_surfaces_ || j >= n_surfaces_) throw std::out_of_range("PotentialModel: surface index");
    if (i > j) std::swap(i, j);
    // Row i of the upper triangle starts after sum_{r<i} (f - r) elements.
    const std::size_t offset = i * n_surfaces_ - i * (i - 1) / 2;
    return upper_[offset + (j - i)];
}

double PotentialModel::value(std::size_t i, std::size_t j, double x) const { return element(i, j).value(x); }

double PotentialModel::derivative(std::size_t i, std::size_t j, double x) const {
    return element(i, j).derivative(x);
}

SampledPotential PotentialModel::sample(const Grid& grid) const {
    SampledPotential s;
    s.n_surfaces = n_surfaces_;
    s.value.assign(n_surfaces_ * n_surfaces_, std::vector<double>(grid.n_points));
    s.derivative.assign(n_surfaces_ * n_surfaces_, std::vector<double>(grid.n_points));
    for (std::size_t i = 0; i < n_surfaces_; ++i) {
        for (std::size_t j = 0; j < n_surfaces_; ++j) {
            const auto& e = element(i, j);
            auto& v = s.value[i * n_surfaces_ + j];
            auto& dv = s.derivative[i * n_surfaces_ + j];
            for (std::size_t k = 0; k < grid.n_points; ++k) {
                const double x = grid.x(k);
                v[k] = e.value(x);
                dv[k] = e.derivative(x);
            }
        }
    }
    return s;
}

double sech(double u) {
    if (std::abs(u) > 350.0) return 0.0;
    return 2.0 / (std::exp(u) + std::exp(-u));
}

namespace {

PotentialModel::Element sech_squared(double height, double alpha) {
    return {
        [height, alpha](double x) {
            const double s = sech(alpha * x);
            return height * s * s;
        },
        [height, alpha](double x) {
            const double s = sech(alpha * x);
            return -2.0 * height * alpha * s * s * std::tanh(alpha * x);
        },
    };
}

PotentialModel::Element zero_element() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }};
}

}  // namespace

PotentialModel eckart(double v0, double alpha) {
    if (!(v0 > 0.0) || !(alpha > 0.0)) throw std::invalid_argument("eckart: V0 and alpha must be positive");
    return PotentialModel("eckart", 1, {sech_squared(v0, alpha)}, {0.0}, {0.0}, {{"V0", v0}, {"alpha", alpha}});
}

PotentialModel barrier_ramp(double v0, double alpha, double beta, double v_left, double v_right) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("barrier_ramp: alpha and beta must be positive");
    if (!std::isfinite(v0) || !std::isfinite(v_left) || !std::isfinite(v_right))
        throw std::invalid_argument("barrier_ramp: non-finite parameter");
    const auto barrier = sech_squared(v0, alpha);
    const double half_step = 0.5 * (v_right - v_left);
    PotentialModel::Element element{
        [=](double x) { return barrier.value(x) + half_step * (std::tanh(beta * x) + 1.0) + v_left; },
        [=](double x) {
            const double s = sech(beta * x);
            return barrier.derivative(x) + half_step * beta * s * s;
        },
    };
    return PotentialModel("barrier_ramp", 1, {element}, {v_left}, {v_right},
                          {{"V0", v0}, {"alpha", alpha}, {"beta", beta}, {"V_L", v_left}, {"V_R", v_right}});
}

PotentialModel two_surface(double v0, double d0, double alpha) {
    if (!(v0 > 0.0) || !(alpha > 0.0) || !(d0 >= 0.0))
        throw std::invalid_argument("two_surface: need V0 > 0, alpha > 0, D0 >= 0");
    const auto coupling = d0 > 0.0 ? sech_squared(d0, alpha) : zero_element();
    return PotentialModel("two_surface", 2, {sech_squared(v0, alpha), coupling, sech_squared(v0, alpha)},
                          {0.0, 0.0}, {0.0, 0.0}, {{"V0", v0}, {"D0", d0}, {"alpha", alpha}});
}

PotentialModel free_particle(std::size_t n_surfaces) {
    std::vector<PotentialModel::Element> upper(n_surfaces * (n_surfaces + 1) / 2, zero_element());
    return PotentialModel("free", n_surfaces, std::move(upper), std::vector<double>(n_surfaces, 0.0),
                          std::vector<double>(n_surfaces, 0.0));
}

}  // namespace bipolar
