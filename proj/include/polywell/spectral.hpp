#pragma once

#include "polywell/core.hpp"
#include "polywell/potentials.hpp"

#include <vector>

namespace polywell {

enum class Parity { Even, Odd };

// One square-well bound state. k = sqrt(2m|E|) is the exterior decay constant,
// k_prime = sqrt(2m(depth+E)) the interior wavenumber. -depth < energy < 0.
struct BoundState {
    int n = 0;            // index in ascending energy order, ground state = 0
    Parity parity = Parity::Even;
    double energy = 0.0;
    double k = 0.0;
    double k_prime = 0.0;
};

struct BoundStateSet {
    double mass = 0.0;
    double depth = 0.0;
    double half_width = 0.0;
    std::vector<BoundState> states;   // ascending energy, parity alternates from even
};

// All bound states of the square well of the given depth and half-width:
// even states solve k' tan(k' w) = k, odd states solve k' cot(k' w) = -k,
// found by bracketed bisection on k' between consecutive tan/cot poles.
// State count equals floor(sqrt(2 m depth) * w / (pi/2)) + 1.
BoundStateSet bound_states(double mass, double depth, double half_width);

// |condition residual| of a state under its parity equation (test hook).
double bound_state_residual(const BoundState& s, double half_width);

// How close sqrt(2 m depth) * w sits to the nearest zero-energy threshold:
// thresholds are k'w = n*pi (even states) and (2n+1)*pi/2 (odd states).
// Small |detuning| predicts a strong quasi-bound resonance in the well.
struct ResonanceDetuning {
    double nearest_threshold = 0.0;   // the multiple of pi/2
    Parity parity = Parity::Even;     // even for n*pi, odd for (2n+1)*pi/2
    double detuning = 0.0;            // sqrt(2 m depth) * w - nearest_threshold
};
ResonanceDetuning resonance_detuning(double mass, double depth, double half_width);

// Predicted wavenumber of the reflected wave train at formation time: pi/(4w).
double predicted_reflected_k(double width);

// Brute-force oracle: negative eigenvalues of the discretized Hamiltonian
// (same three-point stencil and Dirichlet walls as the propagator) via a
// symmetric tridiagonal eigensolver. Eigenvectors are normalized to
// integral |psi|^2 dx = 1. Throws "grid too small" when a returned
// eigenvector exceeds 1e-8 at the outermost interior nodes.
struct DiscreteState {
    double energy = 0.0;
    std::vector<double> eigenvector;   // one entry per grid node, zero at walls
};
std::vector<DiscreteState> diagonalize_well(const PotentialSpec& spec, double mass,
                                            const Grid& grid);

}  // namespace polywell
