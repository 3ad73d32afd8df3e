#include "bipolar/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace bipolar {

std::vector<double> Grid::nodes() const {
    std::vector<double> xs(n_points);
    for (std::size_t k = 0; k < n_points; ++k) xs[k] = x(k);
    return xs;
}

std::size_t Grid::nearest_node(double position) const {
    const double s = std::round((position - x_left) / dx);
    if (!(s > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(s), n_points - 1);
}

Grid make_grid(double x_left, double x_right, std::size_t n_points) {
    if (!std::isfinite(x_left) || !std::isfinite(x_right))
        throw std::invalid_argument("make_grid: non-finite grid bounds");
    if (!(x_right > x_left))
        throw std::invalid_argument("make_grid: x_right must exceed x_left");
    if (n_points < 5)
        throw std::invalid_argument("make_grid: at least 5 nodes are required");
    return Grid{x_left, x_right, n_points, (x_right - x_left) / static_cast<double>(n_points - 1)};
}

ComplexField::ComplexField(const Grid& grid) : grid_(grid), values_(grid.n_points) {}

ComplexField::ComplexField(const Grid& grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n_points)
        throw std::invalid_argument("ComplexField: value count does not match grid");
}

namespace {
void require_same_grid(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument("ComplexField: fields live on different grids");
}
}  // namespace

ComplexField& ComplexField::operator+=(const ComplexField& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

ComplexField& ComplexField::operator*=(Complex factor) {
    for (auto& v : values_) v *= factor;
    return *this;
}

double ComplexField::max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

void second_derivative(std::span<const Complex> f, double dx, std::span<Complex> out) {
    const std::size_t n = f.size();
    const double inv = 1.0 / (dx * dx);
    const Complex zero{};
    for (std::size_t j = 0; j < n; ++j) {
        const Complex left = j > 0 ? f[j - 1] : zero;
        const Complex right = j + 1 < n ? f[j + 1] : zero;
        out[j] = (right - 2.0 * f[j] + left) * inv;
    }
}

void first_derivative(std::span<const Complex> f, double dx, std::span<Complex> out) {
    const std::size_t n = f.size();
    const double inv = 0.5 / dx;
    const Complex zero{};
    for (std::size_t j = 0; j < n; ++j) {
        const Complex left = j > 0 ? f[j - 1] : zero;
        const Complex right = j + 1 < n ? f[j + 1] : zero;
        out[j] = (right - left) * inv;
    }
}

void cumulative_integral(std::span<const Complex> f, double dx, std::span<Complex> out) {
    const std::size_t n = f.size();
    out[0] = Complex{};
    if (n < 2) return;
    out[1] = 0.5 * dx * (f[0] + f[1]);
    const double third = dx / 3.0;
    for (std::size_t k = 2; k < n; ++k)
        out[k] = out[k - 2] + third * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
}

ComplexField second_derivative(const ComplexField& f) {
    ComplexField out(f.grid());
    second_derivative(f.values(), f.grid().dx, out.values());
    return out;
}

ComplexField first_derivative(const ComplexField& f) {
    ComplexField out(f.grid());
    first_derivative(f.values(), f.grid().dx, out.values());
    return out;
}

ComplexField cumulative_integral(const ComplexField& f) {
    ComplexField out(f.grid());
    cumulative_integral(f.values(), f.grid().dx, out.values());
    return out;
}

double integrate(std::span<const double> values, double dx) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    sum -= 0.5 * (values.front() + values.back());
    return sum * dx;
}

Complex integrate(std::span<const Complex> values, double dx) {
    if (values.empty()) return {};
    Complex sum{};
    for (const auto& v : values) sum += v;
    sum -= 0.5 * (values.front() + values.back());
    return sum * dx;
}

double norm_squared(const ComplexField& f) {
    const auto v = f.values();
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& z : v) sum += std::norm(z);
    sum -= 0.5 * (std::norm(v.front()) + std::norm(v.back()));
    return sum * f.grid().dx;
}

double MomentumSpectrum::probability() const {
    double sum = 0.0;
    for (const auto& a : amplitudes) sum += std::norm(a);
    return sum * dp;
}

namespace {

// Lowest signed frequency index, so that index i of the ascending spectrum
// corresponds to frequency (i + first) and FFT slot (i + first) mod n.
long first_frequency(std::size_t n) { return -static_cast<long>(n / 2); }

std::size_t fft_slot(long frequency, std::size_t n) {
    const long len = static_cast<long>(n);
    return static_cast<std::size_t>(((frequency % len) + len) % len);
}

constexpr const char* kConvention =
    "amplitude(p) = dx/sqrt(2*pi*hbar) * sum_k f_k exp(-i p x_k / hbar), hbar = 1, "
    "p ascending over [-pi/dx, pi/dx), sum |amplitude|^2 dp = dx sum |f|^2";

}  // namespace

MomentumSpectrum momentum_spectrum(const ComplexField& f) {
    const Grid& g = f.grid();
    const std::size_t n = g.n_points;

    MomentumSpectrum s;
    s.grid = g;
    s.dp = 2.0 * std::numbers::pi / (static_cast<double>(n) * g.dx);
    s.convention = kConvention;
    s.momenta.resize(n);
    s.amplitudes.resize(n);

    const double peak = f.max_abs();
    const double edge = std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[n - 2]), std::abs(f[n - 1])});
    s.edge_warning = peak > 0.0 && edge >= 1e-8 * peak;

    detail::FftPlan plan(n);
    auto buf = plan.buffer();
    std::copy(f.values().begin(), f.values().end(), buf.begin());
    plan.forward();

    const double scale = g.dx / std::sqrt(2.0 * std::numbers::pi);
    const long first = first_frequency(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long freq = first + static_cast<long>(i);
        const double p = static_cast<double>(freq) * s.dp;
        s.momenta[i] = p;
        // Phase reference at x_left so amplitudes refer to absolute positions.
        s.amplitudes[i] = scale * std::polar(1.0, -p * g.x_left) * buf[fft_slot(freq, n)];
    }
    return s;
}

ComplexField inverse_momentum_spectrum(const MomentumSpectrum& s) {
    const Grid& g = s.grid;
    const std::size_t n = g.n_points;
    if (s.amplitudes.size() != n)
        throw std::invalid_argument("inverse_momentum_spectrum: spectrum does not match its grid");

    detail::FftPlan plan(n);
    auto buf = plan.buffer();
    const double scale = std::sqrt(2.0 * std::numbers::pi) / g.dx;
    const long first = first_frequency(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long freq = first + static_cast<long>(i);
        buf[fft_slot(freq, n)] = scale * std::polar(1.0, s.momenta[i] * g.x_left) * s.amplitudes[i];
    }
    plan.backward();

    ComplexField out(g);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = buf[k] * inv_n;
    return out;
}

}  // namespace bipolar
