#pragma once

#include <complex>
#include <vector>

namespace polywell {

// Units: hbar = 1 everywhere. Energies and momenta are in the units this implies.
using cplx = std::complex<double>;

// Uniform spatial grid with a fixed time step. Node i sits at x_min + i*dx.
// Invariants: n_points >= 3, dx > 0.
struct Grid {
    double x_min;
    double x_max;
    int n_points;
    double dx;   // (x_max - x_min) / (n_points - 1)
    double dt;

    Grid(double x_min_, double x_max_, int n_points_, double dt_);

    double x(int i) const { return x_min + i * dx; }
};

// Complex wave function sampled on a grid, plus the physical time it belongs to.
// Factory-built wave functions carry unit norm (integral |psi|^2 dx = 1 within 1e-12).
struct WaveFunction {
    Grid grid;
    std::vector<cplx> values;   // one per node
    double time = 0.0;

    explicit WaveFunction(const Grid& g) : grid(g), values(g.n_points, cplx{0.0, 0.0}) {}
};

// Global physical parameters. mass > 0.
struct PhysicalParams {
    double mass;

    explicit PhysicalParams(double m);
};

// Integral |psi|^2 dx over the whole grid (trapezoid rule).
double norm(const WaveFunction& psi);

// Integral |psi|^2 dx over [a, b], a < b, clamped to the grid domain.
// End cells that contain a or b are handled by linear interpolation of |psi|^2,
// so probabilities over adjoining regions add exactly and the full-domain value
// equals norm().
double probability_in(const WaveFunction& psi, double a, double b);

// Unnormalized first moment over [a, b]: integral x|psi|^2 dx, same clamping
// and end-cell handling as probability_in.
double weighted_position(const WaveFunction& psi, double a, double b);

// Conditional mean position over [a, b]: integral x|psi|^2 dx / integral |psi|^2 dx,
// both over the region. Throws when the region holds less than 1e-8 probability
// ("empty region"). Whole-grid region gives the plain center of mass.
double center_of_mass(const WaveFunction& psi, double a, double b);

// Probability threshold below which a conditional mean is considered undefined.
inline constexpr double kEmptyRegionThreshold = 1e-8;

// Rescale psi in place to unit norm. Throws if the norm is zero or non-finite.
void normalize(WaveFunction& psi);

}  // namespace polywell
