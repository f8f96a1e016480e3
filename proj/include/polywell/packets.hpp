#pragma once

#include "polywell/core.hpp"

namespace polywell {

enum class PacketShape { Gaussian, Square, Lorentzian, LinearExponential };

// width means: Gaussian delta, Square half-width d, Lorentzian scale,
// LinearExponential decay length. Always > 0.
struct PacketSpec {
    PacketShape shape = PacketShape::Gaussian;
    double q = 0.0;      // mean momentum
    double x0 = 0.0;     // center
    double width = 1.0;
};

// Sample the packet on the grid and normalize numerically to unit norm.
// Shapes (before normalization), u = x - x0:
//   Gaussian:          exp(i q u - u^2 / (4 width^2))
//   Square:            exp(i q u) for |u| <= width, else 0 (nearest node to each
//                      edge takes the interior value)
//   Lorentzian:        exp(i q u) / (1 + (u/width)^2)
//   LinearExponential: exp(i q u - |u|/width)
// Errors: "under-resolved" when grid.dx > width/10; "edge clipping" when a
// Gaussian carries more than 1e-10 probability outside the grid or a square
// support crosses a grid edge; x0 must sit at least 5 widths from both edges.
WaveFunction make_packet(const Grid& grid, const PacketSpec& spec);

// <p> = Im integral conj(psi) d psi/dx dx with centered differences.
double momentum_expectation(const WaveFunction& psi);

}  // namespace polywell
