#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bipolar/numerics.hpp"

namespace bipolar {

/// Potential matrix samples on a grid, row-major over surfaces:
/// value[i * f + j][k] = V_ij(x_k).
struct SampledPotential {
    std::size_t n_surfaces = 0;
    std::vector<std::vector<double>> value;
    std::vector<std::vector<double>> derivative;

    const std::vector<double>& v(std::size_t i, std::size_t j) const { return value[i * n_surfaces + j]; }
    const std::vector<double>& dv(std::size_t i, std::size_t j) const { return derivative[i * n_surfaces + j]; }
};

/// Real symmetric f x f diabatic potential matrix with analytic spatial
/// derivatives. Off-diagonal elements must vanish in both asymptotes.
class PotentialModel {
public:
    using Curve = std::function<double(double)>;

    struct Element {
        Curve value;
        Curve derivative;
    };

    /// `upper` lists the elements (i, j) with i <= j in row-major order;
    /// the lower triangle shares them.
    PotentialModel(std::string name, std::size_t n_surfaces, std::vector<Element> upper,
                   std::vector<double> left_asymptotes, std::vector<double> right_asymptotes,
                   std::vector<std::pair<std::string, double>> parameters = {});

    std::size_t n_surfaces() const { return n_surfaces_; }
    const std::string& name() const { return name_; }
    const std::vector<std::pair<std::string, double>>& parameters() const { return parameters_; }

    double value(std::size_t i, std::size_t j, double x) const;
    double derivative(std::size_t i, std::size_t j, double x) const;

    /// Shorthands for single-surface models.
    double value(double x) const { return value(0, 0, x); }
    double derivative(double x) const { return derivative(0, 0, x); }

    double left_asymptote(std::size_t i = 0) const { return left_.at(i); }
    double right_asymptote(std::size_t i = 0) const { return right_.at(i); }

    SampledPotential sample(const Grid& grid) const;

private:
    const Element& element(std::size_t i, std::size_t j) const;

    std::string name_;
    std::size_t n_surfaces_;
    std::vector<Element> upper_;
    std::vector<double> left_;
    std::vector<double> right_;
    std::vector<std::pair<std::string, double>> parameters_;
};

/// sech(u), returning 0 for |u| > 350 instead of overflowing exp.
double sech(double u);

/// V(x) = V0 sech^2(alpha x).
PotentialModel eckart(double v0, double alpha);

/// V(x) = V0 sech^2(alpha x) + (V_R - V_L)/2 (tanh(beta x) + 1) + V_L.
PotentialModel barrier_ramp(double v0, double alpha, double beta, double v_left, double v_right);

/// V11 = V22 = V0 sech^2(alpha x), V12 = V21 = D0 sech^2(alpha x).
/// D0 = 0 is allowed and gives two uncoupled Eckart surfaces.
PotentialModel two_surface(double v0, double d0, double alpha);

/// V = 0 on `n_surfaces` uncoupled surfaces.
PotentialModel free_particle(std::size_t n_surfaces = 1);

}  // namespace bipolar
