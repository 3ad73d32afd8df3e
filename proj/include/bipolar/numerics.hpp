#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bipolar {

using Complex = std::complex<double>;

/// Uniform 1D mesh. Node k sits at x_left + k * dx; the two edge nodes carry
/// Dirichlet zeros for every wavefunction component and its running integral.
struct Grid {
    double x_left = 0.0;
    double x_right = 0.0;
    std::size_t n_points = 0;
    double dx = 0.0;

    double x(std::size_t k) const { return x_left + static_cast<double>(k) * dx; }
    std::vector<double> nodes() const;
    /// Index of the node closest to `position`, clamped to the grid.
    std::size_t nearest_node(double position) const;

    bool operator==(const Grid&) const = default;
};

/// Throws std::invalid_argument for non-finite bounds, x_right <= x_left or
/// fewer than 5 nodes.
Grid make_grid(double x_left, double x_right, std::size_t n_points);

/// Complex samples on a Grid. The grid is held by value; fields that must
/// interact are checked for grid equality.
class ComplexField {
public:
    ComplexField() = default;
    explicit ComplexField(const Grid& grid);
    ComplexField(const Grid& grid, std::vector<Complex> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    Complex& operator[](std::size_t k) { return values_[k]; }
    const Complex& operator[](std::size_t k) const { return values_[k]; }

    std::span<Complex> values() { return values_; }
    std::span<const Complex> values() const { return values_; }

    ComplexField& operator+=(const ComplexField& other);
    ComplexField& operator-=(const ComplexField& other);
    ComplexField& operator*=(Complex factor);

    friend ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
    friend ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
    friend ComplexField operator*(Complex s, ComplexField a) { return a *= s; }

    double max_abs() const;

private:
    Grid grid_;
    std::vector<Complex> values_;
};

// Span-level kernels used on the propagation hot path. `out` must not alias `f`.
void second_derivative(std::span<const Complex> f, double dx, std::span<Complex> out);
void first_derivative(std::span<const Complex> f, double dx, std::span<Complex> out);
void cumulative_integral(std::span<const Complex> f, double dx, std::span<Complex> out);

/// (f[j+1] - 2 f[j] + f[j-1]) / dx^2 with ghost zeros outside the grid.
ComplexField second_derivative(const ComplexField& f);

/// Centered (f[j+1] - f[j-1]) / (2 dx) with ghost zeros outside the grid.
ComplexField first_derivative(const ComplexField& f);

/// Running integral from the left edge: trapezoid for node 1, then
/// F[k] = F[k-2] + Simpson(k-2, k-1, k) for every k >= 2.
ComplexField cumulative_integral(const ComplexField& f);

/// Trapezoid rule over the whole grid.
double integrate(std::span<const double> values, double dx);
Complex integrate(std::span<const Complex> values, double dx);

/// Trapezoid-rule integral of |f|^2.
double norm_squared(const ComplexField& f);

/// Continuum-normalized discrete Fourier transform of a field:
///   amplitude(p) = dx / sqrt(2 pi) * sum_k f_k exp(-i p x_k)
/// with hbar = 1 and momenta ascending over [-pi/dx, pi/dx). Under this
/// convention sum |amplitude|^2 dp equals dx * sum |f|^2.
struct MomentumSpectrum {
    Grid grid;
    double dp = 0.0;
    std::vector<double> momenta;
    std::vector<Complex> amplitudes;
    std::string convention;
    /// Set when the field did not vanish near the grid edges.
    bool edge_warning = false;

    double probability() const;
};

MomentumSpectrum momentum_spectrum(const ComplexField& f);

/// Inverse of momentum_spectrum (round trip to machine precision).
ComplexField inverse_momentum_spectrum(const MomentumSpectrum& spectrum);

}  // namespace bipolar
