#include "polywell/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace polywell {

Grid::Grid(double x_min_, double x_max_, int n_points_, double dt_)
    : x_min(x_min_), x_max(x_max_), n_points(n_points_), dx(0.0), dt(dt_) {
    if (n_points < 3) {
        throw std::invalid_argument("Grid: n_points must be >= 3");
    }
    if (!(x_max > x_min)) {
        throw std::invalid_argument("Grid: need x_max > x_min");
    }
    dx = (x_max - x_min) / (n_points - 1);
}

PhysicalParams::PhysicalParams(double m) : mass(m) {
    if (!(m > 0.0)) {
        throw std::invalid_argument("PhysicalParams: mass must be > 0");
    }
}

namespace {

// Trapezoid integral of the piecewise-linear interpolant of f over [a, b].
// f(i) is the integrand sampled at node i. Integrating the same interpolant
// makes adjoining regions add exactly.
template <typename F>
double integrate_interval(const Grid& g, F f, double a, double b) {
    a = std::max(a, g.x_min);
    b = std::min(b, g.x_max);
    if (!(a < b)) return 0.0;

    const double dx = g.dx;
    auto value_at = [&](double x) {
        int i = static_cast<int>(std::floor((x - g.x_min) / dx));
        i = std::clamp(i, 0, g.n_points - 2);
        double t = (x - g.x(i)) / dx;
        return (1.0 - t) * f(i) + t * f(i + 1);
    };

    int ia = static_cast<int>(std::ceil((a - g.x_min) / dx - 1e-12));
    int ib = static_cast<int>(std::floor((b - g.x_min) / dx + 1e-12));
    ia = std::clamp(ia, 0, g.n_points - 1);
    ib = std::clamp(ib, 0, g.n_points - 1);

    if (ia > ib) {
        // a and b fall inside one cell.
        return (b - a) * 0.5 * (value_at(a) + value_at(b));
    }

    double total = 0.0;
    if (a < g.x(ia)) {
        total += (g.x(ia) - a) * 0.5 * (value_at(a) + f(ia));
    }
    for (int i = ia; i < ib; ++i) {
        total += dx * 0.5 * (f(i) + f(i + 1));
    }
    if (b > g.x(ib)) {
        total += (b - g.x(ib)) * 0.5 * (f(ib) + value_at(b));
    }
    return total;
}

}  // namespace

double norm(const WaveFunction& psi) {
    auto f = [&](int i) { return std::norm(psi.values[i]); };
    const Grid& g = psi.grid;
    double total = 0.0;
    for (int i = 0; i + 1 < g.n_points; ++i) {
        total += g.dx * 0.5 * (f(i) + f(i + 1));
    }
    return total;
}

double probability_in(const WaveFunction& psi, double a, double b) {
    if (!(a < b)) {
        throw std::invalid_argument("probability_in: need a < b");
    }
    auto f = [&](int i) { return std::norm(psi.values[i]); };
    return integrate_interval(psi.grid, f, a, b);
}

double weighted_position(const WaveFunction& psi, double a, double b) {
    if (!(a < b)) {
        throw std::invalid_argument("weighted_position: need a < b");
    }
    auto xf = [&](int i) { return psi.grid.x(i) * std::norm(psi.values[i]); };
    return integrate_interval(psi.grid, xf, a, b);
}

double center_of_mass(const WaveFunction& psi, double a, double b) {
    if (!(a < b)) {
        throw std::invalid_argument("center_of_mass: need a < b");
    }
    auto f = [&](int i) { return std::norm(psi.values[i]); };
    auto xf = [&](int i) { return psi.grid.x(i) * std::norm(psi.values[i]); };
    double mass_in = integrate_interval(psi.grid, f, a, b);
    if (mass_in < kEmptyRegionThreshold) {
        throw std::runtime_error("center_of_mass: empty region (probability " +
                                 std::to_string(mass_in) + " below threshold)");
    }
    return integrate_interval(psi.grid, xf, a, b) / mass_in;
}

void normalize(WaveFunction& psi) {
    double n = norm(psi);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::runtime_error("normalize: norm is zero or non-finite");
    }
    double s = 1.0 / std::sqrt(n);
    for (auto& v : psi.values) v *= s;
}

}  // namespace polywell
